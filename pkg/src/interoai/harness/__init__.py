"""Experiment harness: configuration, execution, metrics, persistence, CLI."""

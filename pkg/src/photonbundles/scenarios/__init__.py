"""Bundled scenario files; load them by name through the CLI or resolve_scenario."""

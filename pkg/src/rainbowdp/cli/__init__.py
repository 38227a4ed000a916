"""Command-line front end: graph file parsing, CSV/SVG emission, and
the subcommand dispatcher."""

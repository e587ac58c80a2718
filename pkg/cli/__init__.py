"""
Command-line interface: argument parsing and one handler per subcommand.
"""

from rich.console import Console

# Tables go to stdout, so everything meant for the user goes to stderr.
console = Console(record=True, stderr=True)

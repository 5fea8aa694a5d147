"""Main entry point for the grade-d measures toolkit."""

import sys

from dotenv import load_dotenv

from ui.cli.app import run

# Load environment variables
load_dotenv()


def main() -> int:
    """Run one CLI command with the process arguments."""
    return run(sys.argv[1:])


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        sys.exit(130)

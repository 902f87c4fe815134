"""Allow running as python -m limitcycle_sync."""

from limitcycle_sync.cli.app import main

main()

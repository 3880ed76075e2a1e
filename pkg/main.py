"""Main entrypoint for the wireless-reid command line."""

from __future__ import annotations

import sys

from wireless_reid.apps.cli.app import main

if __name__ == "__main__":
    sys.exit(main())

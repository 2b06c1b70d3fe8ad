"""Allow running as `python -m nsq`."""

from nsq.cli import main

main()

"""Allow ``python -m hilb2gw`` to behave like the ``hilb2gw`` script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())

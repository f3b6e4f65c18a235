"""``python -m pylpstruct``."""

from pylpstruct.cli import main

raise SystemExit(main())

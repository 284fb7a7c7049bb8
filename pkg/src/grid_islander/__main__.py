# src/grid_islander/__main__.py
from grid_islander.cli import main

raise SystemExit(main())

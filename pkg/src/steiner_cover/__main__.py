from steiner_cover.cli import main

raise SystemExit(main())

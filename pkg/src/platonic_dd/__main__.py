from platonic_dd.cli import main

raise SystemExit(main())

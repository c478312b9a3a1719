import sys

from energy_model.cli import main

sys.exit(main())

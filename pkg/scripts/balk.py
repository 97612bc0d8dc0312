#!/usr/bin/env python3
"""
balk_metrics CLI runner script.

Run from project root:
    python scripts/balk.py --help
    python scripts/balk.py construct random-metric --n 5 --out data/d.json
    python scripts/balk.py construct diam --metric data/d.json --out data/tau.json
    python scripts/balk.py check --kind balk --input data/tau.json
    python scripts/balk.py pretangent build --scenario data/linear3.json
"""

import sys
from pathlib import Path

# Add packages directory to path so 'balk_metrics' can be imported
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root / "packages"))

if __name__ == "__main__":
    from balk_metrics.cli import main
    main()

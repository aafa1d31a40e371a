import sys
from pathlib import Path

# Make tests/ importable so suites can share oracle helpers (tests.oracles.*).
sys.path.insert(0, str(Path(__file__).resolve().parent))

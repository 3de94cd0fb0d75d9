#!/usr/bin/env python3
"""
Asylum seeker matching - local runner

  python run.py reproduce all
  python run.py solve asylum/data/example6.json --trace
"""

import os
import sys
from dotenv import load_dotenv

# Add the project root to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from asylum.cli import main

if __name__ == "__main__":
    load_dotenv()
    sys.exit(main())

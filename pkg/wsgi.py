#!/usr/bin/env python3
"""WSGI entry point for the cnct_accel evaluation service"""

from cnct_accel.flask_endpoints import app
from dotenv import load_dotenv

load_dotenv()

if __name__ == "__main__":
    app.run()

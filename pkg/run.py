#!/usr/bin/env python3
from app import app
from config import get_settings

if __name__ == '__main__':
    app.run(host='0.0.0.0', port=get_settings().api_port, debug=False)

from __future__ import annotations

version = "0.3.0"

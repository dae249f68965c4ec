"""Database package."""
from app.db.database import Base, get_db, init_db, store_file

from app.db.models import RunRecord, RunStatus

__all__ = [
    "Base", "get_db", "init_db", "store_file",
    "RunRecord", "RunStatus",
]

"""Async SQLite store for run reports."""
import logging
from pathlib import Path
from typing import AsyncIterator, Optional

from sqlalchemy.engine import make_url
from sqlalchemy.ext.asyncio import AsyncSession, async_sessionmaker, create_async_engine
from sqlalchemy.orm import DeclarativeBase

from app.config import get_settings

logger = logging.getLogger(__name__)

settings = get_settings()

engine = create_async_engine(settings.database_url, echo=settings.debug)

async_session_maker = async_sessionmaker(engine, class_=AsyncSession, expire_on_commit=False)


class Base(DeclarativeBase):
    """Base class for stored records."""
    pass


def store_file(database_url: str) -> Optional[Path]:
    """The SQLite file behind ``database_url``; None for in-memory or non-file stores."""
    url = make_url(database_url)
    if not url.get_backend_name().startswith("sqlite") or url.database in (None, "", ":memory:"):
        return None
    return Path(url.database)


async def get_db() -> AsyncIterator[AsyncSession]:
    """Dependency yielding a session; rolled back if the request fails."""
    async with async_session_maker() as session:
        try:
            yield session
        except Exception:
            await session.rollback()
            raise


async def init_db() -> None:
    """Create the run table, and the directory of the SQLite file, if missing."""
    path = store_file(settings.database_url)
    if path is None:
        # test fixtures create in-memory tables per engine
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    async with engine.begin() as conn:
        await conn.run_sync(Base.metadata.create_all)
    logger.info(f"run store ready at {path}")

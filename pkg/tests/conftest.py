"""Pytest configuration and fixtures."""
import pytest
import pytest_asyncio
from httpx import AsyncClient, ASGITransport
from sqlalchemy.ext.asyncio import AsyncSession, create_async_engine, async_sessionmaker

from app.main import app
from app.db.database import Base, get_db
from app.cover.automaton import build_automaton
from app.cover.service import build_cover, initial_constants
from app.cusped.ball import build_ball
from app.cusped.hyperbolicity import estimate_delta
from app.group.matrices import to_fraction
from app.group.representation import standard_representation
from app.harness.experiment import config_from_dict


# Test database URL (SQLite for tests)
TEST_DATABASE_URL = "sqlite+aiosqlite:///:memory:"

# Reduced pipeline settings shared by the slow fixtures
SMALL_CONFIG = {
    "geometry": {"ball_radius": 4, "delta_sample": 30, "geometry_samples": 60, "seed": 0},
    "cover": {"d_sample_size": 64},
    "verification": {
        "sample_size": 40,
        "parabolic_length": 2,
        "pair_count": 12,
        "c_nest_sample": 32,
        "grid": 256,
        "phi_samples": 8,
        "oracle_level": 4,
    },
}


@pytest_asyncio.fixture
async def test_engine():
    """Create a test database engine."""
    engine = create_async_engine(TEST_DATABASE_URL, echo=False)

    async with engine.begin() as conn:
        await conn.run_sync(Base.metadata.create_all)

    yield engine

    async with engine.begin() as conn:
        await conn.run_sync(Base.metadata.drop_all)

    await engine.dispose()


@pytest_asyncio.fixture
async def test_session(test_engine):
    """Create a test database session."""
    async_session = async_sessionmaker(
        test_engine,
        class_=AsyncSession,
        expire_on_commit=False,
    )

    async with async_session() as session:
        yield session


@pytest_asyncio.fixture
async def client(test_session):
    """Create a test client with database override."""
    async def override_get_db():
        yield test_session

    app.dependency_overrides[get_db] = override_get_db

    transport = ASGITransport(app=app)
    async with AsyncClient(transport=transport, base_url="http://test") as client:
        yield client

    app.dependency_overrides.clear()


@pytest.fixture(scope="session")
def small_config():
    """The reduced experiment config."""
    return config_from_dict(SMALL_CONFIG)


@pytest.fixture(scope="session")
def rho0():
    return standard_representation()


@pytest.fixture(scope="session")
def ball(small_config):
    """Radius-4 ball of the cusped space."""
    return build_ball(small_config.geometry.ball_radius)


@pytest.fixture(scope="session")
def delta(ball, small_config):
    return estimate_delta(ball, small_config.geometry.delta_sample, small_config.geometry.seed)


@pytest.fixture(scope="session")
def cover(rho0, delta, small_config):
    """Verified cover of ρ₀ built with the reduced config."""
    constants, shape = initial_constants(
        rho0,
        to_fraction(small_config.cover.epsilon_target),
        small_config.cover.d_sample_size,
        small_config.geometry.seed,
    )
    constants.delta_hat = delta.delta_hat
    return build_cover(rho0, constants, shape, small_config.cover_parameters())


@pytest.fixture(scope="session")
def automaton(cover, ball):
    return build_automaton(cover, ball)

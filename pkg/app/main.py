"""FastAPI application entry point."""
from contextlib import asynccontextmanager

from fastapi import FastAPI

from app.config import get_settings
from app.boundary.router import router as boundary_router
from app.group.router import router as group_router
from app.harness.router import router as runs_router
from app.db.database import init_db


settings = get_settings()


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan handler."""
    # Startup
    await init_db()
    yield
    # Shutdown


app = FastAPI(
    title="Cusp Coding Verifier",
    description="""
    Boundary coding automata for the punctured-torus group relative to its
    cusp, and numerical verification of the semi-conjugacy that survives a
    small deformation making the cusp loxodromic.

    ## Endpoints

    - **Group**: evaluate words under ρ_t, classify, fixed points, ⟨c⟩-cosets
    - **Boundary**: exact chordal distances and the projective action
    - **Runs**: execute the verification pipeline and browse stored reports
    """,
    version=settings.app_version,
    debug=settings.debug,
    lifespan=lifespan,
    license_info={
        "name": "MIT",
        "url": "https://opensource.org/licenses/MIT",
    },
)

# Include routers
app.include_router(group_router, prefix="/api/group", tags=["Group"])
app.include_router(boundary_router, prefix="/api/boundary", tags=["Boundary"])
app.include_router(runs_router, prefix="/api/runs", tags=["Runs"])


@app.get("/health", tags=["Health"])
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "version": settings.app_version}


@app.get("/", tags=["Health"])
async def root():
    return {"name": settings.app_name, "docs": "/docs"}

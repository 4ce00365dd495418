import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from .core.config import settings
from .core.log_config import setup_logging
from .endpoints import solver

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    setup_logging()
    logger.info("Starting orient-subsidy API (invariant checks %s)", "on" if settings.CHECK_INVARIANTS else "off")
    yield
    logger.info("Shutting down orient-subsidy API")


app = FastAPI(
    title="orient-subsidy API",
    version="0.1.0",
    description="Envy-free graph orientations with minimum or bounded subsidies",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.BACKEND_CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(solver.router, prefix="/api/v1", tags=["api"])


@app.get("/")
async def root():
    return {"message": "orient-subsidy API", "status": "running"}


@app.get("/health")
async def health_check():
    return {"status": "healthy", "check_invariants": settings.CHECK_INVARIANTS}

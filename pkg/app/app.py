from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.responses import RedirectResponse

import grd
from app.routers.analysis import router as analysis_router
from app.routers.decisions import router as decisions_router
from app.routers.jobs import router as jobs_router
from app.routers.witnesses import router as witnesses_router
from grd.exceptions import DomainError, InputError


APP_VERSION = "0.1.0"

app = FastAPI(title="Generalized Riemann Derivatives API", version=APP_VERSION, root_path="/")


@app.get("/", include_in_schema=False)
async def redirect():
    return RedirectResponse(url="/docs")


@app.exception_handler(InputError)
async def input_error_handler(request: Request, exc: InputError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(DomainError)
async def domain_error_handler(request: Request, exc: DomainError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


app.include_router(analysis_router)
app.include_router(decisions_router)
app.include_router(witnesses_router)
app.include_router(jobs_router)


@app.get("/versions", response_model=dict[str, str])
def get_versions() -> dict[str, str]:
    return {"grd_api": APP_VERSION, "grd": grd.__version__}

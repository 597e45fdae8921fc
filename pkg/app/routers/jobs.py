import datetime
import os
from typing import Annotated, List, Tuple

from fastapi import APIRouter, Depends, HTTPException
from tinydb import Query, TinyDB

from app.models.jobs import StateEnum, WitnessJob
from app.models.requests import WitnessRequest
from grd.reports import WitnessReport


async def get_db():
    """Get the database connection.

    Yields:
        TinyDB: The database connection, at ``GRD_DB_PATH`` (default ``db.json``).
    """
    db = TinyDB(os.environ.get("GRD_DB_PATH", "db.json"), default=str)
    try:
        yield db
    finally:
        db.close()


router = APIRouter(prefix="/jobs", tags=["jobs"])


def _load_job(db: TinyDB, job_id: int) -> WitnessJob:
    dict_job = db.get(doc_id=job_id)
    if dict_job is None:
        raise HTTPException(status_code=404, detail="Job not found")
    job = WitnessJob(**dict_job)
    job.id = dict_job.doc_id
    return job


@router.post("", response_model=WitnessJob)
def create_job(
    witness_request: WitnessRequest,
    db: Annotated[TinyDB, Depends(get_db)],
) -> WitnessJob:
    """Queues a witness construction for a worker.

    Args:
        witness_request (WitnessRequest): The schemes and witness parameters.
        db (Annotated[TinyDB, Depends): The database to store the job.

    Returns:
        WitnessJob: The created job.
    """
    job = WitnessJob(**witness_request.model_dump())
    job.id = db.insert(job.model_dump(mode="json"))
    return job


@router.get("/claim", response_model=Tuple[int, WitnessRequest])
def claim_job(db: Annotated[TinyDB, Depends(get_db)]) -> Tuple[int, WitnessRequest]:
    dict_jobs = db.search(Query().state == StateEnum.CREATED.value)
    if len(dict_jobs) == 0:
        raise HTTPException(status_code=404, detail="No jobs to claim")
    dict_job = min(dict_jobs, key=lambda d: d.doc_id)
    db.update(
        {"state": StateEnum.CLAIMED.value, "last_updated_at": datetime.datetime.now()},
        doc_ids=[dict_job.doc_id],
    )
    job = WitnessJob(**dict_job)
    return dict_job.doc_id, WitnessRequest(**job.model_dump(include=set(WitnessRequest.model_fields)))


@router.get("/{job_id}", response_model=WitnessJob)
def get_job(job_id: int, db: Annotated[TinyDB, Depends(get_db)]) -> WitnessJob:
    return _load_job(db, job_id)


@router.get("/{job_id}/witness", response_model=WitnessReport)
def get_witness(job_id: int, db: Annotated[TinyDB, Depends(get_db)]) -> WitnessReport:
    job = _load_job(db, job_id)
    if job.witness is None:
        raise HTTPException(status_code=404, detail="Witness not found")
    return job.witness


@router.post("/{job_id}/mark_processed", response_model=StateEnum)
def mark_processed(
    job_id: int,
    witness: WitnessReport,
    db: Annotated[TinyDB, Depends(get_db)],
) -> StateEnum:
    job = _load_job(db, job_id)
    if witness.check is not None and not witness.check.passed:
        raise HTTPException(status_code=422, detail="Witness failed its verification")
    if not job.built_for(witness):
        raise HTTPException(status_code=422, detail="Witness was built for other schemes")
    job.witness = witness
    job.last_updated_at = datetime.datetime.now()
    job.state = StateEnum.FINISHED
    job.error_message = None
    db.update(job.model_dump(mode="json", exclude={"id"}), doc_ids=[job_id])
    return job.state


@router.post("/{job_id}/mark_failed", response_model=StateEnum)
def mark_failed(
    job_id: int,
    error_message: dict[str, str],
    db: Annotated[TinyDB, Depends(get_db)],
) -> StateEnum:
    job = _load_job(db, job_id)
    job.witness = None
    job.last_updated_at = datetime.datetime.now()
    job.state = StateEnum.FAILED
    job.error_message = error_message["msg"]
    db.update(job.model_dump(mode="json", exclude={"id"}), doc_ids=[job_id])
    return job.state


@router.get("/{job_id}/state", response_model=StateEnum)
def get_state(job_id: int, db: Annotated[TinyDB, Depends(get_db)]) -> StateEnum:
    return _load_job(db, job_id).state


@router.get("", response_model=List[WitnessJob])
def get_jobs(db: Annotated[TinyDB, Depends(get_db)]) -> List[WitnessJob]:
    return [WitnessJob(**{**d, **{"id": d.doc_id}}) for d in db.all()]

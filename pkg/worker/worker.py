import json
import logging
import multiprocessing as mp
import time
from typing import Any, Dict, Optional, Tuple

import requests
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.requests import WitnessRequest
from grd.reports import WitnessReport, witness_report
from grd.schemes import resolve_scheme


class Client(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    url: str = "http://localhost:8000"
    session: Any = Field(
        default=requests, exclude=True, description="Anything with requests' get/post"
    )

    @model_validator(mode="after")
    def validate_url(self):
        try:
            self.get_version()
        except Exception:
            raise ValueError(f"Could not connect to {self.url}.")
        return self

    @property
    def headers(self):
        return {"accept": "application/json", "Content-Type": "application/json"}

    def get(self, path: str) -> requests.Response:
        return self.session.get(f"{self.url}{path}", headers=self.headers)

    def post(self, path: str, request_body: Dict) -> requests.Response:
        return self.session.post(f"{self.url}{path}", json=request_body, headers=self.headers)

    def get_version(self) -> Dict[str, str]:
        response = self.get("/versions")
        return response.json()

    def claim_job(self) -> Optional[Tuple[int, WitnessRequest]]:
        response = self.get("/jobs/claim")
        if response.status_code == 404:
            return None
        loaded_response = json.loads(response.content)
        return loaded_response[0], WitnessRequest(**loaded_response[1])

    def mark_processed(self, job_id: int, witness: WitnessReport):
        response = self.post(
            f"/jobs/{job_id}/mark_processed",
            request_body=witness.model_dump(mode="json"),
        )
        return response.json()

    def mark_failed(self, job_id: int, error_message: str):
        response = self.post(f"/jobs/{job_id}/mark_failed", request_body={"msg": error_message})
        return response.json()


class Worker(BaseModel):
    client: Client
    job_check_interval: float
    round: int = 0

    def sleep(self, sleep_time_sec: float, msg: str = ""):
        logging.debug(f"Sleeping for {sleep_time_sec} second(s) ({msg})")
        time.sleep(sleep_time_sec)

    def work(self):
        while True:
            self.work_round()

    @staticmethod
    def process_job(
        job_id: int,
        witness_request: WitnessRequest,
        conn_obj: "mp.connection.Connection",
    ):
        try:
            msg = witness_report(
                resolve_scheme(witness_request.antecedent),
                resolve_scheme(witness_request.consequent),
                scale_count=witness_request.scale_count,
                window_cap=witness_request.window_cap,
            )
            if msg.check is not None and not msg.check.passed:
                msg = Exception(f"witness for job {job_id} failed its verification")
        except Exception as e:
            msg = Exception(str(e))
        finally:
            conn_obj.send(msg)

    def work_round(self):
        logging.debug(f"Starting round {self.round}")
        self.round += 1
        job = self.client.claim_job()
        if job is None:
            logging.debug("No job to work on")
            self.sleep(self.job_check_interval, msg="No job to work on.")
            return

        job_id, witness_request = job
        logging.info(f"Claimed job {job_id}")

        try:
            receiver, sender = mp.Pipe(False)
            proc = mp.Process(target=self.process_job, args=(job_id, witness_request, sender))
            proc.start()

            while True:
                if receiver.poll(timeout=self.job_check_interval):
                    witness = receiver.recv()
                    proc.join()
                    if isinstance(witness, Exception):
                        raise witness
                    self.client.mark_processed(job_id, witness=witness)
                    logging.info(f"Job {job_id} processed successfully")
                    break
                if not proc.is_alive():
                    raise RuntimeError(f"worker process for job {job_id} exited without a result")
        except Exception as e:
            logging.error(f"Error processing job {job_id}: {e}")
            self.client.mark_failed(job_id, error_message=str(e))

import json

from app.models.jobs import WitnessJob
from app.models.requests import WitnessRequest
from grd.reports import WitnessReport, witness_report
from grd.schemes import resolve_scheme
from tests.conftest import Client


def test_jobs(client: Client):
    FAKE_ID = 9999

    wr = WitnessRequest(antecedent="catalog:riemann(2)", consequent="catalog:riemann(1)", scale_count=2)
    response = client.post(path="/jobs", request_body=wr.model_dump_json())
    assert response.status_code == 200
    job = WitnessJob(**json.loads(response.content))

    # get job back
    loaded_job = WitnessJob(**json.loads(client.get(path=f"/jobs/{job.id}").content))
    assert loaded_job.id == job.id
    assert loaded_job.antecedent == wr.antecedent
    assert loaded_job.scale_count == 2
    # check on error when ID does not exist
    response = client.get(path=f"/jobs/{FAKE_ID}")
    assert response.status_code == 404

    # get the state
    state = json.loads(client.get(path=f"/jobs/{job.id}/state").content)
    assert state == "CREATED"
    response = client.get(path=f"/jobs/{FAKE_ID}/state")
    assert response.status_code == 404

    # claim the job
    response = json.loads(client.get(path="/jobs/claim").content)
    assert response[0] == job.id
    assert WitnessRequest(**response[1]).model_dump() == wr.model_dump()

    state = json.loads(client.get(path=f"/jobs/{job.id}/state").content)
    assert state == "CLAIMED"

    # nothing left to claim
    response = client.get(path="/jobs/claim")
    assert response.status_code == 404
    assert response.json()["detail"] == "No jobs to claim"

    # mark as failed
    client.post(path=f"/jobs/{job.id}/mark_failed", request_body=json.dumps({"msg": "error"}))
    state = json.loads(client.get(path=f"/jobs/{job.id}/state").content)
    assert state == "FAILED"
    assert WitnessJob(**json.loads(client.get(path=f"/jobs/{job.id}").content)).error_message == "error"

    # mark wrong id as failed
    response = client.post(path=f"/jobs/{FAKE_ID}/mark_failed", request_body=json.dumps({"msg": "error"}))
    assert response.status_code == 404

    # no witness yet
    response = client.get(path=f"/jobs/{job.id}/witness")
    assert response.status_code == 404
    assert response.json()["detail"] == "Witness not found"

    # mark as processed
    report = witness_report(resolve_scheme(wr.antecedent), resolve_scheme(wr.consequent), scale_count=2)
    response = client.post(path=f"/jobs/{job.id}/mark_processed", request_body=report.model_dump_json())
    assert response.status_code == 200
    state = json.loads(client.get(path=f"/jobs/{job.id}/state").content)
    assert state == "FINISHED"

    # mark wrong id as processed
    response = client.post(path=f"/jobs/{FAKE_ID}/mark_processed", request_body=report.model_dump_json())
    assert response.status_code == 404

    # get the witness
    loaded_report = WitnessReport(**json.loads(client.get(path=f"/jobs/{job.id}/witness").content))
    assert loaded_report.kind == "order-drop"
    assert loaded_report.check.passed
    assert loaded_report.function.witness.scale_prime == 3

    # a witness that failed its check is refused
    failed = report.model_copy(update={"check": report.check.model_copy(update={"passed": False})})
    response = client.post(path=f"/jobs/{job.id}/mark_processed", request_body=failed.model_dump_json())
    assert response.status_code == 422

    # so is a witness for other schemes
    other = witness_report(resolve_scheme("catalog:riemann(3)"), resolve_scheme(wr.consequent), scale_count=2)
    response = client.post(path=f"/jobs/{job.id}/mark_processed", request_body=other.model_dump_json())
    assert response.status_code == 422
    assert response.json()["detail"] == "Witness was built for other schemes"

    # list the jobs
    jobs = [WitnessJob(**d) for d in json.loads(client.get(path="/jobs").content)]
    assert job.id in [j.id for j in jobs]

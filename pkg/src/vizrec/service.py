"""HTTP API serving recommendations, rules and uploaded datasets.

All endpoints are JSON over HTTP. Model artifacts are immutable after load;
the dataset store accepts CSV or table-JSON uploads and can persist them to
a directory, one JSON file per dataset.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .bundle import ModelBundle
from .cli import table_from_csv, table_from_json
from .corpus import CorpusError, Table
from .features import REGISTRY_VERSION
from .pipeline import recommend_table, rules_payload

DEFAULT_PREVIEW_ROWS = 10
DEFAULT_K = 3


class DatasetStore:
    """In-memory table store with optional directory persistence."""

    def __init__(self, directory: str | None = None):
        self._tables: dict[str, Table] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self._dir = Path(directory) if directory else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._dir.glob("*.json")):
                obj = json.loads(path.read_text(encoding="utf-8"))
                table = table_from_json(obj, default_id=path.stem)
                self._tables[table.id] = table

    def add(self, table: Table) -> str:
        with self._lock:
            table_id = table.id
            while table_id in self._tables:
                self._counter += 1
                table_id = "%s-%d" % (table.id, self._counter)
            if table_id != table.id:
                table = Table(id=table_id, columns=table.columns)
            self._tables[table_id] = table
            if self._dir:
                payload = {
                    "id": table_id,
                    "columns": [
                        {"name": c.name, "values": [v.display() for v in c.values]}
                        for c in table.columns
                    ],
                }
                (self._dir / ("%s.json" % table_id)).write_text(
                    json.dumps(payload), encoding="utf-8"
                )
            return table_id

    def get(self, table_id: str) -> Table | None:
        with self._lock:
            return self._tables.get(table_id)

    def list(self) -> list[Table]:
        with self._lock:
            return list(self._tables.values())


def create_app(bundle: ModelBundle, datasets_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="vizrec", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = DatasetStore(datasets_dir)

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        diagnostic_id = uuid.uuid4().hex[:12]
        return JSONResponse(
            status_code=500,
            content={"error": str(exc), "diagnostic_id": diagnostic_id},
        )

    @app.get("/api/meta")
    def meta():
        return {
            "fingerprint": bundle.fingerprint or "in-memory",
            "registry_version": REGISTRY_VERSION,
            "scorer": bundle.model.scorer,
            "dim": bundle.model.dim,
            "n_entities": len(bundle.entity_keys),
        }

    @app.get("/api/datasets")
    def list_datasets():
        return [
            {
                "id": t.id,
                "name": t.id,
                "n_columns": len(t.columns),
                "n_rows": len(t.columns[0].values),
            }
            for t in store.list()
        ]

    @app.post("/api/datasets")
    async def upload_dataset(request: Request):
        body = await request.body()
        content_type = request.headers.get("content-type", "")
        try:
            if "json" in content_type:
                table = table_from_json(json.loads(body.decode("utf-8")))
            else:
                name = request.query_params.get("name", "upload")
                table = table_from_csv(body.decode("utf-8"), table_id=name)
        except (CorpusError, json.JSONDecodeError, UnicodeDecodeError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return {"id": store.add(table)}

    @app.get("/api/datasets/{dataset_id}/table")
    def table_view(dataset_id: str, rows: int = DEFAULT_PREVIEW_ROWS):
        table = store.get(dataset_id)
        if table is None:
            return JSONResponse(status_code=404, content={"error": "unknown dataset %r" % dataset_id})
        n = max(0, rows)
        return {
            "id": table.id,
            "columns": [c.name for c in table.columns],
            "column_types": [c.general_type for c in table.columns],
            "rows": [
                [c.values[i].display() for c in table.columns]
                for i in range(min(n, len(table.columns[0].values)))
            ],
            "n_rows": len(table.columns[0].values),
        }

    @app.get("/api/datasets/{dataset_id}/recommendations")
    def recommendations(dataset_id: str, k: int = DEFAULT_K):
        table = store.get(dataset_id)
        if table is None:
            return JSONResponse(status_code=404, content={"error": "unknown dataset %r" % dataset_id})
        return recommend_table(bundle, table, k=k)

    @app.get("/api/rules")
    def rules(per_type: int = 5):
        return rules_payload(bundle, per_type=per_type)

    @app.get("/", include_in_schema=False)
    def root():
        return Response(content="vizrec API", media_type="text/plain")

    return app

"""HTTP JSON API over a knowledge base, plus static hosting for the web UI.

The API is stateless; the KB file is the durable state.  All mutations
funnel through one writer lock, reads run concurrently.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .kb import KnowledgeBase
from .semantics import question_to_goal, tree_to_term
from .parser import normalize_sentence
from .terms import render

__all__ = ["create_app"]

_REJECT = (ValueError,)  # every engine error derives from ValueError


class SentenceBody(BaseModel):
    sentence: str


class QuestionBody(BaseModel):
    question: str


def create_app(
    kb: KnowledgeBase,
    *,
    autosave_path: Optional[str] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="lplm", docs_url=None, redoc_url=None)
    write_lock = threading.Lock()

    def flush():
        if autosave_path:
            kb.save(autosave_path)

    def reject(exc: Exception):
        raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/api/health")
    def health():
        return {"status": "ok", "facts": len(kb)}

    @app.post("/api/statements")
    def add_statement(body: SentenceBody):
        try:
            with write_lock:
                stmt = kb.add(body.sentence)
                flush()
        except _REJECT as exc:
            reject(exc)
        return {
            "term": render(stmt.term),
            "tree": stmt.tree.text() if stmt.tree else None,
            "prob": float(stmt.prob) if stmt.prob is not None else None,
        }

    @app.delete("/api/statements")
    def remove_statement(body: SentenceBody):
        try:
            with write_lock:
                removed = kb.remove(body.sentence)
                flush()
        except _REJECT as exc:
            reject(exc)
        return {"removed": removed}

    @app.post("/api/query")
    def query(body: QuestionBody):
        try:
            answer = kb.query(body.question)
        except _REJECT as exc:
            reject(exc)
        if answer.kind == "yesno":
            return {"kind": "yesno", "truth": "yes" if answer.truth else "no"}
        return {
            "kind": "wh",
            "answers": [
                {"term": render(t), "source": src} for t, src in answer.bindings
            ],
        }

    @app.get("/api/kb")
    def list_kb():
        return [
            {"term": render(f.term), "source": f.source} for f in kb.facts
        ]

    @app.post("/api/parse")
    def parse(body: SentenceBody):
        try:
            kind, tree, prob = kb.interpret(body.sentence)
            if kind == "question":
                term = question_to_goal(tree).term
            else:
                term = tree_to_term(tree, source=normalize_sentence(body.sentence)).term
        except _REJECT as exc:
            reject(exc)
        return {
            "kind": kind,
            "tree": tree.text(),
            "prob": float(prob),
            "term": render(term),
        }

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app

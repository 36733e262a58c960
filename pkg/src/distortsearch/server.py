"""Local HTTP service backing the interactive UI.

Sessions live in memory. The compose/preview form of the query endpoint
accepts an intent and pattern and returns the assembled segments; the
execution form accepts only a rendered segment list, so the engine-facing
path never carries any marker of which segment is the real intent.
"""
from __future__ import annotations

import json
import logging
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import datapaths
from .lexicon import Lexicon, load_lexicon
from .obfuscate import SEGMENT_SEPARATOR, assemble_query
from .searchsim import Ad, ScoredDoc, SearchIndex, load_ads, load_corpus, sample_ads
from .session import ClickEvent, PseudoProfile, exposure_report, update_profile
from .textmine import load_stopwords

logger = logging.getLogger(__name__)

DEFAULT_PAGE_SIZE = 10
DEFAULT_ADS_PER_PAGE = 4


class QueryBody(BaseModel):
    intent: str | None = None
    pattern: str | None = None
    seed: int | None = None
    preview: bool = False
    segments: list[str] | None = None
    top_k: int | None = None


class ClickBody(BaseModel):
    target: str
    kind: str


@dataclass
class LiveSession:
    id: str
    rng: Random
    profile: PseudoProfile = field(default_factory=PseudoProfile)
    log: list[dict] = field(default_factory=list)
    last_page: list[ScoredDoc] = field(default_factory=list)
    last_ads: list[Ad] = field(default_factory=list)
    served: list[Ad] = field(default_factory=list)
    intent: str | None = None
    seq: int = 0
    query_count: int = 0


def _doc_payload(hit: ScoredDoc) -> dict:
    return {
        "id": hit.doc.id,
        "url": hit.doc.url,
        "title": hit.doc.title,
        "snippet": hit.doc.snippet,
        "categories": list(hit.doc.categories),
        "score": hit.score,
    }


def _ad_payload(ad: Ad) -> dict:
    return {"id": ad.id, "text": ad.text, "category": ad.category}


def create_app(
    corpus_path: str | Path | None = None,
    ads_path: str | Path | None = None,
    lexicon_path: str | Path | None = None,
    stopwords_path: str | Path | None = None,
    seed: int = 0,
    report_dir: str | Path | None = None,
    page_size: int = DEFAULT_PAGE_SIZE,
    ads_per_page: int = DEFAULT_ADS_PER_PAGE,
) -> FastAPI:
    """Build the FastAPI app with corpora loaded once at startup."""
    lexicon: Lexicon = load_lexicon(lexicon_path or datapaths.lexicon_path())
    stopwords = load_stopwords(stopwords_path or datapaths.stopwords_path())
    corpus = load_corpus(corpus_path or datapaths.corpus_path())
    index = SearchIndex(corpus, stopwords)
    inventory = load_ads(ads_path or datapaths.ads_path())
    sessions: dict[str, LiveSession] = {}
    counter = {"n": 0}
    report_base = Path(report_dir) if report_dir is not None else None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        _flush_session_logs(sessions, report_base)

    app = FastAPI(title="distortsearch", lifespan=lifespan)

    def _session(session_id: str) -> LiveSession:
        live = sessions.get(session_id)
        if live is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return live

    @app.post("/sessions")
    def create_session() -> dict:
        counter["n"] += 1
        sid = f"S{counter['n']}"
        sessions[sid] = LiveSession(id=sid, rng=Random(f"{seed}:{sid}"))
        return {"session_id": sid}

    @app.post("/sessions/{session_id}/query")
    def post_query(session_id: str, body: QueryBody) -> dict:
        live = _session(session_id)
        top_k = body.top_k or page_size
        if top_k < 1 or top_k > 1000:
            raise HTTPException(status_code=400, detail="top_k must be in [1, 1000]")

        if body.segments is not None:
            if body.intent is not None or body.pattern is not None:
                raise HTTPException(
                    status_code=400,
                    detail="send either segments (execute) or intent+pattern (compose), not both",
                )
            if not body.segments or any(not s.strip() for s in body.segments):
                raise HTTPException(status_code=400, detail="segments must be non-empty strings")
            query_payload = {"segments": list(body.segments)}
            text = SEGMENT_SEPARATOR.join(body.segments)
        else:
            if not body.intent or not body.intent.strip():
                raise HTTPException(status_code=400, detail="intent must be non-empty")
            if not body.pattern or not body.pattern.strip():
                raise HTTPException(status_code=400, detail="pattern must be non-empty")
            rng = live.rng if body.seed is None else Random(body.seed)
            live.query_count += 1
            try:
                query = assemble_query(
                    body.intent,
                    body.pattern,
                    lexicon,
                    rng,
                    query_id=f"{session_id}-Q{live.query_count}",
                )
            except (ValueError, LookupError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            live.intent = body.intent.strip()
            query_payload = query.to_dict()
            if body.preview:
                return {"query": query_payload, "result_page": [], "ads": []}
            text = query.text

        page = index.execute(text, top_k=top_k)
        ads = sample_ads(inventory, live.profile.category_weights, ads_per_page, live.rng)
        live.last_page = page
        live.last_ads = ads
        live.served.extend(ads)
        for ad in ads:
            live.log.append(
                {
                    "type": "ad_impression",
                    "session_id": session_id,
                    "target": ad.id,
                    "target_kind": "ad",
                    "categories": [ad.category],
                    "timestamp": live.seq,
                }
            )
            live.seq += 1
        return {
            "query": query_payload,
            "result_page": [_doc_payload(h) for h in page],
            "ads": [_ad_payload(a) for a in ads],
        }

    @app.post("/sessions/{session_id}/click")
    def post_click(session_id: str, body: ClickBody) -> dict:
        live = _session(session_id)
        if body.kind == "result":
            match = next((h.doc for h in live.last_page if h.doc.id == body.target), None)
            if match is None:
                raise HTTPException(
                    status_code=400,
                    detail=f"target {body.target!r} is not on the current result page",
                )
            categories = match.categories
        elif body.kind == "ad":
            ad = next((a for a in live.last_ads if a.id == body.target), None)
            if ad is None:
                raise HTTPException(
                    status_code=400,
                    detail=f"target {body.target!r} is not in the current ad strip",
                )
            categories = (ad.category,)
        else:
            raise HTTPException(status_code=400, detail="kind must be 'result' or 'ad'")
        event = ClickEvent(
            session_id=session_id,
            query_id="",
            target=body.target,
            target_kind=body.kind,
            categories=categories,
            timestamp=live.seq,
        )
        live.seq += 1
        live.profile = update_profile(live.profile, [event])
        live.log.append(event.to_dict())
        return {"profile": live.profile.to_dict(), "total": live.profile.total}

    @app.get("/sessions/{session_id}/profile")
    def get_profile(session_id: str) -> dict:
        live = _session(session_id)
        exposure = None
        if live.served and live.intent:
            exposure = exposure_report(live.served, live.intent, stopwords).to_dict()
        return {
            "profile": live.profile.to_dict(),
            "total": live.profile.total,
            "exposure": exposure,
        }

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str) -> dict:
        live = _session(session_id)
        return {"events": list(live.log)}

    @app.get("/report/latest")
    def report_latest() -> dict:
        if report_base is not None:
            path = report_base / "report.json"
            if path.is_file():
                return json.loads(path.read_text(encoding="utf-8"))
        raise HTTPException(status_code=404, detail="no report has been generated yet")

    return app


def _flush_session_logs(sessions: dict[str, LiveSession], report_base: Path | None) -> None:
    if report_base is None or not sessions:
        return
    out = report_base / "sessions"
    out.mkdir(parents=True, exist_ok=True)
    for sid, live in sessions.items():
        path = out / f"{sid}.jsonl"
        with path.open("w", encoding="utf-8") as fh:
            for record in live.log:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    logger.info("flushed %d session log(s) to %s", len(sessions), out)


def serve(
    host: str = "127.0.0.1",
    port: int = 8571,
    **app_kwargs,
) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(**app_kwargs)
    uvicorn.run(app, host=host, port=port, log_level="info")

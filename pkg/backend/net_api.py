# FastAPI HTTP layer over the net analyses
from datetime import datetime, timezone
from typing import Dict, List, Literal, Optional
import logging
import os
import time

import networkx as nx
import pydantic
from dotenv import load_dotenv
from fastapi import FastAPI, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, RedirectResponse
from pydantic import BaseModel, Field, field_validator

from compat import process_of
from conflict import ConflictReport, binary_conflict_free, conflict_free, is_structural_conflict_net
from diamond import LargestProcessWitness, largest_fs_process
from net_errors import NetValidationError, ProcNetError
from net_io import export_dot, parse_net
from net_model import Net, NotFirable, fire_word
from process_model import GRProcess, check_process
from reachability import REACHABILITY_CONFIG, ExplorationBudget, enumerate_firing_sequences_report
from seqequiv import SEQ_CONFIG, AdjacencyCertificate, fs_le_witness, seq_star_certificate
from swapping import SwapCertificate, swap_star_certificate

load_dotenv()

logging.basicConfig(level=os.getenv('PROCNET_LOG_LEVEL', 'INFO'))
logger = logging.getLogger(__name__)

API_CONFIG = {
    'MAX_NET_TEXT_SIZE': int(os.getenv('PROCNET_MAX_NET_TEXT_SIZE', '100000')),
    'ALLOWED_ORIGINS': os.getenv('ALLOWED_ORIGINS', 'http://localhost:3000,http://localhost:8080').split(','),
    'PORT': int(os.getenv('PORT', '8000')),
    'MAX_WORD_LEN': SEQ_CONFIG['MAX_WORD_LEN'],
}

VERSION = "1.0.0"
_started = time.monotonic()

app = FastAPI(
    title="procnet API",
    description="Process semantics of place/transition nets",
    version=VERSION,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=API_CONFIG['ALLOWED_ORIGINS'],
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["Content-Type"],
)


class NetRequest(BaseModel):
    net: str = Field(..., min_length=1, description="Net in the line-oriented text format")

    @field_validator('net')
    @classmethod
    def validate_size(cls, v):
        if len(v) > API_CONFIG['MAX_NET_TEXT_SIZE']:
            raise ValueError(f"net text too large (max {API_CONFIG['MAX_NET_TEXT_SIZE']} characters)")
        return v


class WordRequest(NetRequest):
    word: List[str] = Field(default_factory=list)


class BoundRequest(NetRequest):
    max_len: int = Field(default=REACHABILITY_CONFIG['MAX_LEN'], ge=0, le=12)


class ConflictRequest(NetRequest):
    kind: Literal["binary", "full", "structural"] = "binary"
    marking_budget: int = Field(default=REACHABILITY_CONFIG['MARKING_BUDGET'], ge=1)
    mult_cap: Optional[int] = Field(default=None, ge=1)


class SequencePairRequest(NetRequest):
    sigma: List[str] = Field(default_factory=list)
    rho: List[str] = Field(default_factory=list)

    @field_validator('sigma', 'rho')
    @classmethod
    def validate_length(cls, v):
        if len(v) > API_CONFIG['MAX_WORD_LEN']:
            raise ValueError(f"words are limited to {API_CONFIG['MAX_WORD_LEN']} transitions")
        return v


class ProcessPairRequest(NetRequest):
    p: GRProcess
    q: GRProcess


class LargestRequest(NetRequest):
    enum_bound: int = Field(default=4, ge=0, le=8)


class HealthResponse(BaseModel):
    status: str
    version: str
    dependencies: Dict[str, str]
    uptime: Optional[float] = None


class ErrorResponse(BaseModel):
    detail: str
    error_code: Optional[str] = None
    details: Dict = Field(default_factory=dict)
    timestamp: datetime


class ValidateResponse(BaseModel):
    valid: bool
    violations: List[str] = Field(default_factory=list)
    places: int = 0
    transitions: int = 0


class FireResponse(BaseModel):
    firable: bool
    marking: Optional[Dict[str, int]] = None
    failed_at: Optional[int] = None


class FiringSequencesResponse(BaseModel):
    words: List[List[str]]
    truncated: bool


class SequenceEquivalenceResponse(BaseModel):
    equivalent: bool
    certificate: Optional[AdjacencyCertificate] = None


class SequenceLeResponse(BaseModel):
    holds: bool
    sigma_prime: Optional[List[str]] = None
    rho_prime: Optional[List[str]] = None
    certificate: Optional[AdjacencyCertificate] = None


class ProcessResponse(BaseModel):
    process: GRProcess
    dot: str


class ProcessEquivalenceResponse(BaseModel):
    equivalent: bool
    certificate: Optional[SwapCertificate] = None


class LargestResponse(BaseModel):
    witness: LargestProcessWitness
    process: GRProcess
    dot: str


@app.exception_handler(ProcNetError)
async def procnet_error_handler(request: Request, exc: ProcNetError):
    """Map analysis errors onto structured JSON responses"""
    logger.warning("API error: %s (code: %s)", exc.message, exc.error_code)
    body = ErrorResponse(detail=exc.message, error_code=exc.error_code, details=exc.details,
                         timestamp=datetime.now(timezone.utc))
    return JSONResponse(status_code=exc.status_code, content=body.model_dump(mode="json"))


@app.exception_handler(Exception)
async def generic_exception_handler(request: Request, exc: Exception):
    logger.error("Unexpected error: %s", str(exc), exc_info=True)
    body = ErrorResponse(detail="An unexpected error occurred.", error_code="INTERNAL_ERROR",
                         timestamp=datetime.now(timezone.utc))
    return JSONResponse(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, content=body.model_dump(mode="json"))


def _net(req: NetRequest) -> Net:
    return parse_net(req.net)


@app.get("/")
def root():
    return RedirectResponse(url="/docs")


@app.get("/health", response_model=HealthResponse)
def health_check():
    return HealthResponse(
        status="healthy",
        version=VERSION,
        dependencies={"networkx": nx.__version__, "pydantic": pydantic.VERSION},
        uptime=time.monotonic() - _started,
    )


@app.post("/nets/validate", response_model=ValidateResponse)
def validate_net(req: NetRequest):
    try:
        net = _net(req)
    except NetValidationError as e:
        return ValidateResponse(valid=False, violations=e.violations)
    return ValidateResponse(valid=True, places=len(net.places), transitions=len(net.transitions))


@app.post("/nets/fire", response_model=FireResponse)
def fire(req: WordRequest):
    net = _net(req)
    outcome = fire_word(net, net.initial_marking, req.word)
    if isinstance(outcome, NotFirable):
        return FireResponse(firable=False, failed_at=outcome.index)
    return FireResponse(firable=True, marking=outcome.to_dict())


@app.post("/nets/firing-sequences", response_model=FiringSequencesResponse)
def firing_sequences(req: BoundRequest):
    enumeration = enumerate_firing_sequences_report(_net(req), req.max_len)
    return FiringSequencesResponse(words=[list(w) for w in enumeration.words], truncated=enumeration.truncated)


@app.post("/nets/conflicts", response_model=ConflictReport)
def conflicts(req: ConflictRequest):
    net = _net(req)
    budget = ExplorationBudget(max_markings=req.marking_budget)
    if req.kind == "full":
        return conflict_free(net, budget, req.mult_cap)
    if req.kind == "structural":
        return is_structural_conflict_net(net, budget)
    return binary_conflict_free(net, budget)


@app.post("/sequences/equivalence", response_model=SequenceEquivalenceResponse)
def sequence_equivalence(req: SequencePairRequest):
    cert = seq_star_certificate(_net(req), req.sigma, req.rho)
    return SequenceEquivalenceResponse(equivalent=cert is not None, certificate=cert)


@app.post("/sequences/le", response_model=SequenceLeResponse)
def sequence_le(req: SequencePairRequest):
    witness = fs_le_witness(_net(req), req.sigma, req.rho)
    if witness is None:
        return SequenceLeResponse(holds=False)
    sigma_prime, rho_prime, cert = witness
    return SequenceLeResponse(holds=True, sigma_prime=list(sigma_prime), rho_prime=list(rho_prime),
                              certificate=cert)


@app.post("/processes/of", response_model=ProcessResponse)
def process_of_word(req: WordRequest):
    p = process_of(_net(req), req.word)
    return ProcessResponse(process=p, dot=export_dot(p))


@app.post("/processes/equivalence", response_model=ProcessEquivalenceResponse)
def process_equivalence(req: ProcessPairRequest):
    net = _net(req)
    check_process(req.p, net)
    check_process(req.q, net)
    cert = swap_star_certificate(req.p, req.q)
    return ProcessEquivalenceResponse(equivalent=cert is not None, certificate=cert)


@app.post("/largest", response_model=LargestResponse)
def largest(req: LargestRequest):
    net = _net(req)
    witness = largest_fs_process(net, req.enum_bound)
    p = process_of(net, witness.rho)
    logger.info("Largest process for %s computed with bound %d", net.name, req.enum_bound)
    return LargestResponse(witness=witness, process=p, dot=export_dot(p))


def serve(host: str = "127.0.0.1", port: Optional[int] = None) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port or API_CONFIG['PORT'])

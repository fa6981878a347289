"""Vision-chat backends behind one interface: a live HTTP client speaking the
OpenAI-style chat-completions protocol, and a deterministic mock oracle with
configurable fault injection for validator testing. Also the tolerant parsing
of operator responses into node labels."""

from __future__ import annotations

import base64
import hashlib
import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from evograph.graph import Graph, Label, betweenness, label_key
from evograph.render import png_bytes

DEFAULT_MODEL_ID = "gpt-4o-2024-11-20"

MOCK_ROLES = (
    "init_intelligent",
    "init_betweenness_spread",
    "init_degree_central",
    "crossover",
    "mutation_remove",
    "mutation_add",
    "mutation_oneshot",
)


class GatewayError(Exception):
    """Base class for backend failures."""


class GatewayCredentialError(GatewayError):
    pass


class GatewayTransportError(GatewayError):
    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempts)")
        self.attempts = attempts


class GatewayRequestError(GatewayError):
    pass


class GatewayInputError(GatewayError):
    pass


class ResponseParseError(GatewayError):
    def __init__(self, message: str, raw: str):
        super().__init__(f"{message}; raw response: {raw!r}")
        self.raw = raw


@dataclass(frozen=True)
class OperatorContext:
    """Structured side-channel the mock needs (a live model reads the images
    instead); the live backend ignores it apart from transcript tagging."""

    role: str
    k: int | None = None
    parents: tuple[tuple, ...] | None = None
    solution: tuple | None = None


@dataclass
class GatewayRequest:
    system_prompt: str
    user_prompt: str
    images: tuple = ()
    model_id: str = DEFAULT_MODEL_ID
    temperature: float = 0.7
    max_tokens: int = 512
    context: OperatorContext | None = None

    def __post_init__(self):
        if not self.system_prompt or not self.user_prompt:
            raise GatewayInputError("prompts must be non-empty")


@dataclass(frozen=True)
class GatewayResponse:
    text: str
    latency_s: float
    token_usage: dict | None = None


# -- response parsing ----------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z]*\n?(.*?)```", re.DOTALL)
_WORD_RE = re.compile(r"[A-Za-z0-9_\-]+")
# integers, guarding against decimal fragments while allowing sentence periods
_INT_RE = re.compile(r"(?<![\w.])-?\d+(?!\d)(?!\.\d)")


def parse_node_list(text: str, expected_len: int | None = None) -> list[str]:
    """Tolerant label extraction: strip code fences, brackets and prose, then
    split on commas (taking the last word of each segment) or whitespace.

    ``expected_len`` is a hint only; neither length nor membership is
    validated here - the validators own that.
    """
    raw = text
    fenced = _FENCE_RE.search(text)
    if fenced:
        text = fenced.group(1)
    text = text.strip().strip("[](){}").strip()
    if "," in text:
        tokens = []
        for segment in text.split(","):
            words = _WORD_RE.findall(segment)
            if words:
                tokens.append(words[-1])
        if tokens:
            return tokens
        raise ResponseParseError("no labels found in comma-separated response", raw)
    integers = _INT_RE.findall(text)
    if integers:
        return integers
    words = _WORD_RE.findall(text)
    if len(words) == 1:
        return words
    if words:
        return words
    raise ResponseParseError("no extractable labels", raw)


def parse_swap_pair(text: str) -> tuple[str, str]:
    """Exactly two labels, in (remove, add) order."""
    tokens = parse_node_list(text)
    if len(tokens) != 2:
        raise ResponseParseError(f"expected 2 labels, got {len(tokens)}", text)
    return tokens[0], tokens[1]


# -- transcript logging --------------------------------------------------------


class TranscriptWriter:
    """Append-only JSONL audit log of every gateway call."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        if not os.path.exists(path):  # manifest lists it even for call-free runs
            open(path, "w", encoding="utf-8").close()

    def record(self, req: GatewayRequest, resp: GatewayResponse) -> None:
        entry = {
            "model": req.model_id,
            "operator": req.context.role if req.context else None,
            "prompt_sha256": hashlib.sha256(
                (req.system_prompt + "\n" + req.user_prompt).encode()
            ).hexdigest(),
            "image_sha256": [hashlib.sha256(png_bytes(im)).hexdigest() for im in req.images],
            "response_text": resp.text,
            "latency_s": resp.latency_s,
            "token_usage": resp.token_usage,
        }
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


def read_transcript(path: str) -> list[dict]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


# -- mock oracle ---------------------------------------------------------------

FAULT_CLASSES = (
    "invalid_node",
    "wrong_size",
    "duplicate",
    "nonparent_source",
    "remove_nonseed",
    "add_invalid",
    "add_repeat",
    "low_degree",
)

_FAULTS_BY_PHASE = {
    "init": ("invalid_node", "wrong_size", "low_degree"),
    "crossover": ("wrong_size", "duplicate", "nonparent_source"),
    "mutation_remove": ("remove_nonseed",),
    "mutation_add": ("add_invalid", "add_repeat"),
    "mutation_oneshot": ("remove_nonseed", "add_invalid", "add_repeat"),
}


@dataclass(frozen=True)
class MockOracleConfig:
    rng_seed: int = 0
    invalid_node: float = 0.0
    wrong_size: float = 0.0
    duplicate: float = 0.0
    nonparent_source: float = 0.0
    remove_nonseed: float = 0.0
    add_invalid: float = 0.0
    add_repeat: float = 0.0
    low_degree: float = 0.0

    def __post_init__(self):
        for name in FAULT_CLASSES:
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"fault rate {name}={rate} outside [0, 1]")
        for phase, names in _FAULTS_BY_PHASE.items():
            total = sum(getattr(self, n) for n in names)
            if total > 1.0 + 1e-12:
                raise ValueError(f"fault rates for {phase} sum to {total} > 1")


class MockOracle:
    """Deterministic stand-in for a vision model: degree/betweenness-greedy
    answers with at most one injected fault per response.

    Results depend only on (seed, request order); successive init calls for
    the same agent rotate their selection window through the above-median
    degree pool so populations stay diverse while every zero-fault answer
    passes all validators (for k up to the pool size).
    """

    def __init__(self, graph: Graph, cfg: MockOracleConfig | None = None):
        from evograph.community import detect_fastgreedy

        self.graph = graph
        self.cfg = cfg or MockOracleConfig()
        self._rng = random.Random(self.cfg.rng_seed)
        self._lock = threading.Lock()
        self._call_counts: dict[str, int] = {}
        degs = graph.degrees()
        self._degree = degs
        ordered_degrees = sorted(degs.values())
        mid = len(ordered_degrees) // 2
        if len(ordered_degrees) % 2:
            self._median_degree = float(ordered_degrees[mid])
        else:
            self._median_degree = (ordered_degrees[mid - 1] + ordered_degrees[mid]) / 2.0
        self._safe = [lab for lab in graph.nodes() if degs[lab] >= self._median_degree]
        self._betweenness = None
        self._communities = None
        self._detect = detect_fastgreedy

    # lazy: only the spread/intelligent agents need these
    def _bc(self) -> dict:
        if self._betweenness is None:
            self._betweenness = betweenness(self.graph)
        return self._betweenness

    def _comms(self):
        if self._communities is None:
            self._communities = self._detect(self.graph)
        return self._communities

    def _by_degree(self, labels: Iterable[Label]) -> list:
        return sorted(labels, key=lambda l: (-self._degree[l], label_key(l)))

    def _round_robin(self, metric: dict) -> list:
        safe = set(self._safe)
        comms = sorted(
            self._comms().communities,
            key=lambda c: (-len(c), min(label_key(l) for l in c)),
        )
        columns = [
            sorted((l for l in c if l in safe), key=lambda l: (-metric[l], label_key(l)))
            for c in comms
        ]
        flat: list = []
        depth = 0
        while any(depth < len(col) for col in columns):
            for col in columns:
                if depth < len(col):
                    flat.append(col[depth])
            depth += 1
        return flat

    def _init_pool(self, role: str) -> list:
        if role == "init_degree_central":
            return self._by_degree(self._safe)
        if role == "init_intelligent":
            return self._round_robin(self._degree)
        if role == "init_betweenness_spread":
            return self._round_robin(self._bc())
        raise ValueError(f"not an init role: {role}")

    def _pick_rotated(self, pool: list, k: int, call_index: int) -> list:
        if k > len(pool):  # pool exhausted: fall back to global degree order
            extra = [l for l in self._by_degree(self.graph.nodes()) if l not in pool]
            pool = pool + extra
        start = (call_index * k) % len(pool)
        picked = []
        i = start
        while len(picked) < k:
            lab = pool[i % len(pool)]
            if lab not in picked:
                picked.append(lab)
            i += 1
        return picked

    # -- clean answers ----------------------------------------------------

    def _clean_tokens(self, role: str, k, parents, solution) -> list:
        if role.startswith("init_"):
            if k is None:
                raise GatewayInputError("init roles need k")
            idx = self._call_counts.get(role, 0)
            self._call_counts[role] = idx + 1
            return self._pick_rotated(self._init_pool(role), k, idx)
        if role == "crossover":
            if not parents or len(parents) != 2:
                raise GatewayInputError("crossover needs two parents")
            if k is None:
                raise GatewayInputError("crossover needs k")
            union = sorted(set(parents[0]) | set(parents[1]), key=label_key)
            ranked = self._by_degree(union)
            if len(ranked) < k:
                ranked += [l for l in self._by_degree(self.graph.nodes()) if l not in ranked]
            return ranked[:k]
        if role == "mutation_remove":
            if not solution:
                raise GatewayInputError("mutation needs the current solution")
            return [min(solution, key=lambda l: (self._degree[l], label_key(l)))]
        if role == "mutation_add":
            if not solution:
                raise GatewayInputError("mutation needs the current solution")
            non_seed = [l for l in self.graph.nodes() if l not in set(solution)]
            if not non_seed:
                raise GatewayInputError("no non-seed node available")
            return [min(non_seed, key=lambda l: (-self._degree[l], label_key(l)))]
        if role == "mutation_oneshot":
            rem = self._clean_tokens("mutation_remove", k, parents, solution)[0]
            add = self._clean_tokens("mutation_add", k, parents, solution)[0]
            return [rem, add]
        raise ValueError(f"unknown mock role {role!r}")

    # -- fault injection ---------------------------------------------------

    def _unknown_label(self) -> str:
        labels = set(str(l) for l in self.graph.nodes())
        probe = 10 ** (max((len(s) for s in labels), default=1) + 2)
        while str(probe) in labels:
            probe += 1
        return str(probe)

    def _apply_fault(self, fault: str, tokens: list, role: str, parents, solution) -> list:
        tokens = list(tokens)
        if fault == "invalid_node":
            tokens[-1] = self._unknown_label()
        elif fault == "wrong_size":
            if len(tokens) >= 2:
                tokens.pop()
            else:
                spare = [l for l in self._safe if l not in tokens]
                if spare:
                    tokens.append(self._by_degree(spare)[0])
        elif fault == "duplicate":
            if len(tokens) >= 2:
                tokens[-1] = tokens[0]
            else:
                tokens.append(tokens[0])
        elif fault == "nonparent_source":
            union = set(parents[0]) | set(parents[1])
            outside = [l for l in self.graph.nodes() if l not in union and l not in tokens]
            if outside:
                tokens[-1] = self._by_degree(outside)[0]
        elif fault == "low_degree":
            weak = [
                l
                for l in self.graph.nodes()
                if self._degree[l] < self._median_degree and l not in tokens
            ]
            if weak:
                tokens[-1] = sorted(weak, key=lambda l: (self._degree[l], label_key(l)))[0]
        elif fault == "remove_nonseed":
            outside = [l for l in self.graph.nodes() if l not in set(solution)]
            if outside:
                tokens[0] = min(outside, key=lambda l: (self._degree[l], label_key(l)))
        elif fault == "add_invalid":
            tokens[-1] = self._unknown_label()
        elif fault == "add_repeat":
            removal = tokens[0] if role == "mutation_oneshot" else None
            pool = [l for l in solution if l != removal]
            if pool:
                tokens[-1] = self._by_degree(pool)[0]
        return tokens

    def _phase_of(self, role: str) -> str:
        return "init" if role.startswith("init_") else role

    def respond(
        self,
        role: str,
        k: int | None = None,
        parents: Sequence[Sequence[Label]] | None = None,
        solution: Sequence[Label] | None = None,
    ) -> str:
        """One deterministic answer; with configured probabilities corrupts it
        in exactly one named way."""
        if role not in MOCK_ROLES:
            raise ValueError(f"unknown mock role {role!r}")
        with self._lock:
            tokens = self._clean_tokens(role, k, parents, solution)
            phase = self._phase_of(role)
            faults = _FAULTS_BY_PHASE[phase]
            u = self._rng.random()
            cum = 0.0
            for fault in faults:
                cum += getattr(self.cfg, fault)
                if u < cum:
                    tokens = self._apply_fault(fault, tokens, role, parents, solution)
                    break
        if role == "mutation_oneshot":
            return "[" + ", ".join(str(t) for t in tokens) + "]"
        return ", ".join(str(t) for t in tokens)


def mock_respond(
    role: str,
    graph_ctx: Graph,
    k: int | None = None,
    parents=None,
    solution=None,
    cfg: MockOracleConfig | None = None,
) -> str:
    """One-shot convenience wrapper around a fresh :class:`MockOracle`."""
    return MockOracle(graph_ctx, cfg).respond(role, k=k, parents=parents, solution=solution)


# -- gateways -------------------------------------------------------------------


class MockGateway:
    """Routes requests to a :class:`MockOracle` using the structured context."""

    def __init__(self, graph: Graph, cfg: MockOracleConfig | None = None,
                 transcript: TranscriptWriter | None = None):
        self.oracle = MockOracle(graph, cfg)
        self.transcript = transcript

    def complete(self, req: GatewayRequest) -> GatewayResponse:
        if req.context is None:
            raise GatewayInputError("mock backend needs an operator context")
        ctx = req.context
        text = self.oracle.respond(
            ctx.role, k=ctx.k, parents=ctx.parents, solution=ctx.solution
        )
        resp = GatewayResponse(text=text, latency_s=0.0, token_usage=None)
        if self.transcript:
            self.transcript.record(req, resp)
        return resp


@dataclass
class LiveGatewayConfig:
    base_url: str = "https://api.openai.com/v1"
    model_id: str = DEFAULT_MODEL_ID
    api_key_env: str = "OPENAI_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 3
    max_inflight: int = 4
    min_interval_s: float = 0.0
    backoff_base_s: float = 0.5
    max_image_bytes: int = 20_000_000


_TRANSIENT_STATUS = {429, 500, 502, 503, 504}


class _TokenBucket:
    """Serializes call starts to at most one per ``min_interval_s``."""

    def __init__(self, min_interval_s: float):
        self.min_interval_s = min_interval_s
        self._lock = threading.Lock()
        self._next_ok = 0.0

    def acquire(self) -> None:
        if self.min_interval_s <= 0:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._next_ok - now
            self._next_ok = max(now, self._next_ok) + self.min_interval_s
        if wait > 0:
            time.sleep(wait)


class LiveGateway:
    """OpenAI-style chat-completions client with images as base64 data URLs.

    Retries transient failures (connection errors, timeouts, 429/5xx) with
    exponential backoff; 4xx auth/validation failures never retry. Bounded
    concurrency via a semaphore plus a token bucket.
    """

    def __init__(self, cfg: LiveGatewayConfig | None = None,
                 transcript: TranscriptWriter | None = None):
        self.cfg = cfg or LiveGatewayConfig()
        self.transcript = transcript
        self._sem = threading.Semaphore(self.cfg.max_inflight)
        self._bucket = _TokenBucket(self.cfg.min_interval_s)

    def _payload(self, req: GatewayRequest) -> dict:
        parts: list[dict] = [{"type": "text", "text": req.user_prompt}]
        total = 0
        for img in req.images:
            data = png_bytes(img)
            total += len(data)
            if total > self.cfg.max_image_bytes:
                raise GatewayInputError(
                    f"attached images exceed {self.cfg.max_image_bytes} bytes"
                )
            encoded = base64.b64encode(data).decode("ascii")
            parts.append(
                {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{encoded}"}}
            )
        return {
            "model": req.model_id or self.cfg.model_id,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "messages": [
                {"role": "system", "content": req.system_prompt},
                {"role": "user", "content": parts},
            ],
        }

    def complete(self, req: GatewayRequest) -> GatewayResponse:
        import requests

        api_key = os.environ.get(self.cfg.api_key_env)
        if not api_key:
            raise GatewayCredentialError(
                f"no API key in ${self.cfg.api_key_env}; set it or use the mock backend"
            )
        payload = self._payload(req)
        url = self.cfg.base_url.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {api_key}"}
        attempts = 0
        last_error = "no attempt made"
        start = time.monotonic()
        while attempts <= self.cfg.max_retries:
            attempts += 1
            try:
                with self._sem:
                    self._bucket.acquire()
                    resp = requests.post(
                        url, json=payload, headers=headers, timeout=self.cfg.timeout_s
                    )
            except requests.RequestException as exc:
                last_error = f"transport failure: {exc}"
                time.sleep(self.cfg.backoff_base_s * (2 ** (attempts - 1)))
                continue
            if resp.status_code in (401, 403):
                raise GatewayCredentialError(f"authentication rejected ({resp.status_code})")
            if resp.status_code in _TRANSIENT_STATUS:
                last_error = f"HTTP {resp.status_code}"
                time.sleep(self.cfg.backoff_base_s * (2 ** (attempts - 1)))
                continue
            if resp.status_code >= 400:
                raise GatewayRequestError(f"HTTP {resp.status_code}: {resp.text[:500]}")
            body = resp.json()
            try:
                text = body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise GatewayRequestError(f"malformed completion payload: {exc}") from exc
            usage = body.get("usage")
            token_usage = None
            if isinstance(usage, dict):
                token_usage = {
                    "input": usage.get("prompt_tokens"),
                    "output": usage.get("completion_tokens"),
                }
            out = GatewayResponse(
                text=text, latency_s=time.monotonic() - start, token_usage=token_usage
            )
            if self.transcript:
                self.transcript.record(req, out)
            return out
        raise GatewayTransportError(last_error, attempts)


def complete_with_images(
    req: GatewayRequest,
    backend: str,
    *,
    mock_graph: Graph | None = None,
    mock_cfg: MockOracleConfig | None = None,
    live_cfg: LiveGatewayConfig | None = None,
) -> GatewayResponse:
    """Single-call convenience dispatcher over the two backends."""
    if backend == "mock":
        if mock_graph is None:
            raise GatewayInputError("mock backend needs the graph context")
        return MockGateway(mock_graph, mock_cfg).complete(req)
    if backend == "live":
        return LiveGateway(live_cfg).complete(req)
    raise GatewayInputError(f"unknown backend {backend!r}")

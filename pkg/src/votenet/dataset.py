"""Voting dataset model, canonical-format parsing, and dump-file adapters."""
from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Mapping, Union

log = logging.getLogger(__name__)

Source = Union[str, Path, bytes, IO[bytes], IO[str]]


class IngestError(ValueError):
    """Raised for malformed or inconsistent input files."""


class VoteOption(Enum):
    YES = "YES"
    NO = "NO"
    OBSTRUCTION = "OBSTRUCTION"
    NOT_COUNTED = "NOT_COUNTED"

    @property
    def counted(self) -> bool:
        """Whether this option participates in similarity/discipline math."""
        return self is not VoteOption.NOT_COUNTED


@dataclass(frozen=True)
class VoteRecord:
    session_id: str
    member_id: str
    party: str
    option: VoteOption


@dataclass(frozen=True)
class VoteDataset:
    """One time window of voting sessions.

    Immutable after construction; safe to share across threads. `members`
    maps member_id to the party label of that member's most recent record
    in the window.
    """

    window_label: str
    sessions: tuple[str, ...]
    records: tuple[VoteRecord, ...]
    members: Mapping[str, str]

    @staticmethod
    def build(window_label: str, records: Iterable[VoteRecord],
              sessions: Iterable[str] | None = None) -> "VoteDataset":
        records = tuple(records)
        seen_pairs: set[tuple[str, str]] = set()
        session_order: list[str] = []
        session_seen: set[str] = set()
        members: dict[str, str] = {}
        for r in records:
            key = (r.session_id, r.member_id)
            if key in seen_pairs:
                raise IngestError(
                    f"duplicate vote for member {r.member_id!r} in session {r.session_id!r}")
            seen_pairs.add(key)
            if r.session_id not in session_seen:
                session_seen.add(r.session_id)
                session_order.append(r.session_id)
            if r.member_id in members and members[r.member_id] != r.party:
                log.warning("member %s switches party %s -> %s within window %s; "
                            "keeping most recent label",
                            r.member_id, members[r.member_id], r.party, window_label)
            members[r.member_id] = r.party
        if sessions is not None:
            sessions = tuple(sessions)
            missing = session_seen - set(sessions)
            if missing:
                raise IngestError(f"records reference sessions not listed: {sorted(missing)}")
        else:
            sessions = tuple(session_order)
        return VoteDataset(window_label, sessions, records, members)

    def counted_sessions(self, member_id: str) -> set[str]:
        """Sessions where the member cast a counted vote."""
        return {r.session_id for r in self.records
                if r.member_id == member_id and r.option.counted}

    def votes_by_session(self, counted_only: bool = True) -> dict[str, dict[str, VoteOption]]:
        """session_id -> {member_id -> option}, counted votes only by default."""
        out: dict[str, dict[str, VoteOption]] = {s: {} for s in self.sessions}
        for r in self.records:
            if counted_only and not r.option.counted:
                continue
            out[r.session_id][r.member_id] = r.option
        return out


# --- canonical line format -------------------------------------------------

def _read_text(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def parse_canonical(source: Source, window_label: str = "window") -> VoteDataset:
    """Parse the tab-separated canonical vote format.

    Lines: ``session_id<TAB>member_id<TAB>party<TAB>option``. Lines starting
    with ``#`` are comments; a ``# window: <label>`` comment sets the window
    label.
    """
    text = _read_text(source)
    records: list[VoteRecord] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.lower().startswith("window:"):
                window_label = body.split(":", 1)[1].strip()
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise IngestError(f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}")
        session_id, member_id, party, token = (f.strip() for f in fields)
        try:
            option = VoteOption(token)
        except ValueError:
            raise IngestError(f"line {lineno}: unknown vote option token {token!r}") from None
        records.append(VoteRecord(session_id, member_id, party, option))
    return VoteDataset.build(window_label, records)


def serialize_canonical(d: VoteDataset) -> str:
    lines = [f"# window: {d.window_label}"]
    by_session = {s: [] for s in d.sessions}
    for r in d.records:
        by_session[r.session_id].append(r)
    for s in d.sessions:
        for r in by_session[s]:
            lines.append(f"{r.session_id}\t{r.member_id}\t{r.party}\t{r.option.value}")
    return "\n".join(lines) + "\n"


def write_canonical(d: VoteDataset, path: str | Path) -> None:
    Path(path).write_text(serialize_canonical(d), encoding="utf-8")


# --- adapters for downloaded dump files ------------------------------------

_CAMARA_OPTIONS = {
    "sim": VoteOption.YES,
    "não": VoteOption.NO,
    "nao": VoteOption.NO,
    "obstrução": VoteOption.OBSTRUCTION,
    "obstrucao": VoteOption.OBSTRUCTION,
    "abstenção": VoteOption.NOT_COUNTED,
    "abstencao": VoteOption.NOT_COUNTED,
    "ausente": VoteOption.NOT_COUNTED,
    "ausência": VoteOption.NOT_COUNTED,
    "ausencia": VoteOption.NOT_COUNTED,
    "art. 17": VoteOption.NOT_COUNTED,
    "-": VoteOption.NOT_COUNTED,
}

_PROPUBLICA_OPTIONS = {
    "yes": VoteOption.YES,
    "aye": VoteOption.YES,
    "no": VoteOption.NO,
    "nay": VoteOption.NO,
    "not voting": VoteOption.NOT_COUNTED,
    "present": VoteOption.NOT_COUNTED,
}


def _map_option(token: str, table: Mapping[str, VoteOption], origin: str) -> VoteOption:
    option = table.get(token.strip().lower())
    if option is None:
        raise IngestError(f"unmapped {origin} vote option {token!r}")
    return option


def adapt_camara(source: Source, window_label: str = "window") -> VoteDataset:
    """Adapt a downloaded Brazilian chamber roll-call dump (XML or JSON).

    XML: ``<Votacao codSessao=...><votos><Deputado ideCadastro=... Partido=...
    Voto=.../></votos></Votacao>`` elements. JSON: ``{"votacoes": [{"id": ...,
    "votos": [{"deputado": ..., "partido": ..., "voto": ...}]}]}``.
    """
    text = _read_text(source).strip()
    records: list[VoteRecord] = []
    if text.startswith("<"):
        try:
            root = ET.fromstring(text)
        except ET.ParseError as exc:
            raise IngestError(f"unparseable camara XML dump: {exc}") from exc
        sessions = [el for el in root.iter() if el.tag.lower() == "votacao"]
        if not sessions and root.tag.lower() == "votacao":
            sessions = [root]
        for idx, sess in enumerate(sessions):
            sid = (sess.get("codSessao") or sess.get("id")
                   or "|".join(filter(None, (sess.get("Data"), sess.get("ObjVotacao"))))
                   or f"votacao-{idx}")
            deputies = [el for el in sess.iter() if el.tag.lower() == "deputado"]
            for dep in deputies:
                member = dep.get("ideCadastro") or dep.get("id") or dep.get("Nome")
                party = dep.get("Partido") or dep.get("partido") or ""
                voto = dep.get("Voto") or dep.get("voto")
                if member is None or voto is None:
                    raise IngestError("camara XML vote element missing member id or Voto")
                records.append(VoteRecord(str(sid), str(member), party.strip(),
                                          _map_option(voto, _CAMARA_OPTIONS, "camara")))
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"camara dump is neither XML nor JSON: {exc}") from exc
        if isinstance(doc, dict):
            sessions = doc.get("votacoes", doc.get("dados"))
        else:
            sessions = doc
        if sessions is None or not isinstance(sessions, list):
            raise IngestError("camara JSON dump lacks a 'votacoes' (or 'dados') session list")
        for idx, sess in enumerate(sessions):
            sid = str(sess.get("id", f"votacao-{idx}"))
            for voto in sess.get("votos", []):
                member = voto.get("deputado") or voto.get("deputado_id")
                party = voto.get("partido") or voto.get("siglaPartido") or ""
                token = voto.get("voto") or voto.get("tipoVoto")
                if member is None or token is None:
                    raise IngestError(f"camara JSON vote in session {sid!r} missing member or voto")
                records.append(VoteRecord(sid, str(member), str(party).strip(),
                                          _map_option(token, _CAMARA_OPTIONS, "camara")))
    return VoteDataset.build(window_label, records)


def adapt_propublica(source: Source, window_label: str = "window") -> VoteDataset:
    """Adapt a downloaded ProPublica House vote-positions dump (JSON).

    Accepts ``{"results": {"votes": [...]}}``, ``{"votes": [...]}`` or a bare
    list of vote objects; each vote has ``positions`` with ``member_id``,
    ``party`` and ``vote_position``.
    """
    text = _read_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"unparseable propublica JSON dump: {exc}") from exc
    if isinstance(doc, dict):
        doc = doc.get("results", doc)
        votes = doc.get("votes") if isinstance(doc, dict) else None
        if votes is None and isinstance(doc, dict) and "positions" in doc:
            votes = [doc]
    else:
        votes = doc
    if votes is None or not isinstance(votes, list):
        raise IngestError("propublica dump lacks a 'votes' list")
    records: list[VoteRecord] = []
    for idx, vote in enumerate(votes):
        parts = [str(vote[k]) for k in ("congress", "session", "roll_call") if k in vote]
        sid = "-".join(parts) if parts else f"vote-{idx}"
        for pos in vote.get("positions", []):
            member = pos.get("member_id") or pos.get("id")
            party = pos.get("party", "")
            token = pos.get("vote_position") or pos.get("position")
            if member is None or token is None:
                raise IngestError(f"propublica position in vote {sid!r} missing member or position")
            records.append(VoteRecord(sid, str(member), str(party).strip(),
                                      _map_option(token, _PROPUBLICA_OPTIONS, "propublica")))
    return VoteDataset.build(window_label, records)


ADAPTERS = {
    "canonical": parse_canonical,
    "camara": adapt_camara,
    "propublica": adapt_propublica,
}


# --- attendance filter ------------------------------------------------------

def filter_low_attendance(d: VoteDataset, max_missed_fraction: float = 1.0 / 3.0) -> VoteDataset:
    """Drop members whose missed-session fraction exceeds the threshold.

    A session counts as attended only when the member cast a counted vote
    (obstruction attends, absence markers do not). Removal is strict:
    missed fraction exactly equal to the threshold is retained. The session
    list is unchanged.
    """
    total = len(d.sessions)
    if total == 0:
        return d
    attended: dict[str, int] = {m: 0 for m in d.members}
    for r in d.records:
        if r.option.counted:
            attended[r.member_id] += 1
    keep = {m for m, n in attended.items() if (total - n) / total <= max_missed_fraction}
    records = tuple(r for r in d.records if r.member_id in keep)
    members = {m: p for m, p in d.members.items() if m in keep}
    return VoteDataset(d.window_label, d.sessions, records, members)

"""Exact JSON input and output for instances, profiles, models, trees.

Numbers travel as JSON integers or as strings like "3/4"; JSON floats
are rejected outright so no value ever passes through binary floating
point.  Emission is canonical (lowest-terms "p/q" strings, fixed key
order), which is what makes reruns byte-identical.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

from . import adapters
from .extensive import GameTree, InternalNode, TerminalNode, TreeNode
from .games import (
    BimatrixGame,
    Game,
    GameError,
    Instance,
    PiecewiseLinear,
    PotentialGame,
    RepeatedGame,
    StrictlyCompetitiveGame,
    TransferGame,
    ZeroSumGame,
    build_instance,
)
from .rational import fmt, rat
from .stability import SINGLE, MatchingProfile

__all__ = [
    "SchemaError",
    "load_json",
    "dump_json",
    "parse_instance",
    "load_instance_file",
    "dump_instance",
    "parse_profile",
    "load_profile_file",
    "dump_profile",
    "parse_tree",
    "load_tree_file",
    "parse_model",
    "load_model_file",
]


class SchemaError(ValueError):
    """An input file violates the schema; the message names the field."""


def _reject_float(text: str) -> Fraction:
    raise SchemaError(
        f"float literal {text!r} not allowed; write numbers as integers or \"p/q\" strings"
    )


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh, parse_float=_reject_float)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def dump_json(path: str, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _num(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaError(f"{where}: expected an integer or \"p/q\" string, got {value!r}")
    try:
        return rat(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _num_out(x: Fraction) -> Any:
    # Integers stay JSON integers; everything else is a canonical string.
    if x.denominator == 1:
        return int(x)
    return fmt(x)


def _str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"{where}: expected a string, got {value!r}")
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: expected a list, got {value!r}")
    return value


def _dict(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"{where}: expected an object, got {value!r}")
    return value


def _check_keys(obj: Mapping, where: str, required: Tuple[str, ...], optional: Tuple[str, ...] = ()) -> None:
    keys = set(obj)
    missing = set(required) - keys
    extra = keys - set(required) - set(optional)
    if missing:
        raise SchemaError(f"{where}: missing field(s) {sorted(missing)}")
    if extra:
        raise SchemaError(f"{where}: unknown field(s) {sorted(extra)}")


def _collect_numbers(value: Any, where: str, out: List[Fraction]) -> None:
    # Any nesting of lists bottoms out in exact numbers.
    if isinstance(value, list):
        for k, item in enumerate(value):
            _collect_numbers(item, f"{where}[{k}]", out)
    else:
        out.append(_num(value, where))


# Numeric payload fields per game class; trailing "?" marks optional.
_GAME_FIELDS: Dict[str, Tuple[Tuple[str, bool], ...]] = {
    "bimatrix": (("u", True), ("v", True)),
    "potential": (("u", True), ("v", True), ("phi", True)),
    "zero_sum": (("g", True), ("resolution", False)),
    "strictly_competitive": (
        ("g", True),
        ("f", True),
        ("h", True),
        ("resolution", False),
    ),
    "transfer": (
        ("t_min", True),
        ("t_max", True),
        ("f_u", True),
        ("f_v", True),
        ("resolution", False),
    ),
    "repeated": (("u", True), ("v", True), ("resolution", False)),
}


def _game_skeleton(payload: Any, where: str) -> Tuple[str, dict]:
    obj = _dict(payload, where)
    if "class" not in obj:
        raise SchemaError(f"{where}: missing game class tag")
    cls = _str(obj["class"], f"{where}.class")
    if cls not in _GAME_FIELDS:
        raise SchemaError(f"{where}.class: unknown game class {cls!r}")
    fields = _GAME_FIELDS[cls]
    required = tuple(name for name, req in fields if req)
    optional = tuple(name for name, req in fields if not req)
    _check_keys(obj, where, required + ("class",), optional)
    return cls, obj


def _breakpoints(value: Any, where: str) -> List[Tuple[Fraction, Fraction]]:
    pts = _list(value, where)
    out = []
    for k, p in enumerate(pts):
        pair = _list(p, f"{where}[{k}]")
        if len(pair) != 2:
            raise SchemaError(f"{where}[{k}]: breakpoints are [x, y] pairs")
        out.append((_num(pair[0], f"{where}[{k}][0]"), _num(pair[1], f"{where}[{k}][1]")))
    return out


def _matrix_in(value: Any, where: str) -> List[List[Fraction]]:
    rows = _list(value, where)
    out = []
    for r, row in enumerate(rows):
        out.append([_num(x, f"{where}[{r}][{c}]") for c, x in enumerate(_list(row, f"{where}[{r}]"))])
    return out


def parse_game(payload: Any, where: str, default_resolution: Optional[Fraction]) -> Game:
    """Build one couple game from its tagged payload."""
    cls, obj = _game_skeleton(payload, where)

    def resolution() -> Fraction:
        if "resolution" in obj:
            return _num(obj["resolution"], f"{where}.resolution")
        if default_resolution is None or default_resolution <= 0:
            raise SchemaError(
                f"{where}: no menu resolution; give the game an explicit "
                "\"resolution\" or run with a positive eps (default is eps/2)"
            )
        return default_resolution

    try:
        if cls == "bimatrix":
            return BimatrixGame(_matrix_in(obj["u"], f"{where}.u"), _matrix_in(obj["v"], f"{where}.v"))
        if cls == "potential":
            return PotentialGame(
                _matrix_in(obj["u"], f"{where}.u"),
                _matrix_in(obj["v"], f"{where}.v"),
                _matrix_in(obj["phi"], f"{where}.phi"),
            )
        if cls == "zero_sum":
            return ZeroSumGame(_matrix_in(obj["g"], f"{where}.g"), resolution())
        if cls == "strictly_competitive":
            return StrictlyCompetitiveGame(
                _matrix_in(obj["g"], f"{where}.g"),
                resolution(),
                PiecewiseLinear(_breakpoints(obj["f"], f"{where}.f")),
                PiecewiseLinear(_breakpoints(obj["h"], f"{where}.h")),
            )
        if cls == "transfer":
            return TransferGame(
                _num(obj["t_min"], f"{where}.t_min"),
                _num(obj["t_max"], f"{where}.t_max"),
                resolution(),
                PiecewiseLinear(_breakpoints(obj["f_u"], f"{where}.f_u")),
                PiecewiseLinear(_breakpoints(obj["f_v"], f"{where}.f_v")),
            )
        return RepeatedGame(
            _matrix_in(obj["u"], f"{where}.u"),
            _matrix_in(obj["v"], f"{where}.v"),
            resolution(),
        )
    except GameError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _matrix_out(rows) -> list:
    return [[_num_out(x) for x in row] for row in rows]


def _points_out(pl: PiecewiseLinear) -> list:
    return [[_num_out(x), _num_out(y)] for x, y in pl.points]


def dump_game(game: Game) -> dict:
    """Tagged payload for one couple game; inverse of parse_game."""
    if isinstance(game, PotentialGame):
        return {
            "class": "potential",
            "u": _matrix_out(game.U),
            "v": _matrix_out(game.V),
            "phi": _matrix_out(game.phi),
        }
    if isinstance(game, RepeatedGame):
        return {
            "class": "repeated",
            "u": _matrix_out(game.U),
            "v": _matrix_out(game.V),
            "resolution": _num_out(game.resolution),
        }
    if isinstance(game, BimatrixGame):
        return {"class": "bimatrix", "u": _matrix_out(game.U), "v": _matrix_out(game.V)}
    if isinstance(game, StrictlyCompetitiveGame):
        return {
            "class": "strictly_competitive",
            "g": _matrix_out(game.g),
            "f": _points_out(game.f),
            "h": _points_out(game.h),
            "resolution": _num_out(game.resolution),
        }
    if isinstance(game, ZeroSumGame):
        return {
            "class": "zero_sum",
            "g": _matrix_out(game.g),
            "resolution": _num_out(game.resolution),
        }
    if isinstance(game, TransferGame):
        return {
            "class": "transfer",
            "t_min": _num_out(game.t_min),
            "t_max": _num_out(game.t_max),
            "f_u": _points_out(game.f_u),
            "f_v": _points_out(game.f_v),
            "resolution": _num_out(game.resolution),
        }
    raise SchemaError(f"cannot serialize game of kind {game.kind!r}")


def _names(value: Any, where: str) -> List[str]:
    names = [_str(x, f"{where}[{k}]") for k, x in enumerate(_list(value, where))]
    if len(set(names)) != len(names):
        raise SchemaError(f"{where}: names must be distinct")
    if not names:
        raise SchemaError(f"{where}: must be nonempty")
    return names


def parse_instance(data: Any, eps=None) -> Tuple[Instance, Fraction]:
    """Parse an instance object; returns (instance, margin actually used).

    With eps omitted, an instance whose raw numbers are all integers
    defaults to eps = 1; anything else is rejected so the caller must
    choose.  Games without an explicit menu resolution get eps/2, or
    the top-level "menu_resolution" when present.
    """
    obj = _dict(data, "instance")
    _check_keys(obj, "instance", ("men", "women", "irp", "games"), ("menu_resolution",))
    men = _names(obj["men"], "instance.men")
    women = _names(obj["women"], "instance.women")
    if set(men) & set(women):
        raise SchemaError("instance: men and women must not share names")
    irp = _dict(obj["irp"], "instance.irp")
    _check_keys(irp, "instance.irp", ("men", "women"))
    irp_men = [_num(x, f"instance.irp.men[{k}]") for k, x in enumerate(_list(irp["men"], "instance.irp.men"))]
    irp_women = [
        _num(x, f"instance.irp.women[{k}]") for k, x in enumerate(_list(irp["women"], "instance.irp.women"))
    ]
    if len(irp_men) != len(men) or len(irp_women) != len(women):
        raise SchemaError("instance.irp: one reservation payoff per agent")

    games_obj = _dict(obj["games"], "instance.games")
    if set(games_obj) != set(men):
        raise SchemaError("instance.games: keys must be exactly the men")
    skeletons: Dict[Tuple[int, int], Tuple[str, dict, str]] = {}
    numbers: List[Fraction] = list(irp_men) + list(irp_women)
    for i, m in enumerate(men):
        row = _dict(games_obj[m], f"instance.games[{m!r}]")
        if set(row) != set(women):
            raise SchemaError(f"instance.games[{m!r}]: keys must be exactly the women")
        for j, w in enumerate(women):
            where = f"instance.games[{m!r}][{w!r}]"
            cls, payload = _game_skeleton(row[w], where)
            skeletons[(i, j)] = (cls, payload, where)
            for name, _req in _GAME_FIELDS[cls]:
                if name in payload:
                    _collect_numbers(payload[name], f"{where}.{name}", numbers)
    if "menu_resolution" in obj:
        numbers.append(_num(obj["menu_resolution"], "instance.menu_resolution"))

    if eps is not None:
        eps_used = rat(eps)
    elif all(x.denominator == 1 for x in numbers):
        eps_used = Fraction(1)
    else:
        raise SchemaError(
            "instance has non-integer payoffs, so there is no default margin; pass --eps"
        )

    if "menu_resolution" in obj:
        default_res = _num(obj["menu_resolution"], "instance.menu_resolution")
    else:
        default_res = eps_used / 2 if eps_used > 0 else None

    games = {
        key: parse_game(payload, where, default_res)
        for key, (_cls, payload, where) in skeletons.items()
    }
    return build_instance(men, women, irp_men, irp_women, games), eps_used


def load_instance_file(path: str, eps=None) -> Tuple[Instance, Fraction]:
    return parse_instance(load_json(path), eps=eps)


def dump_instance(inst: Instance) -> dict:
    return {
        "men": list(inst.men),
        "women": list(inst.women),
        "irp": {
            "men": [_num_out(x) for x in inst.irp_men],
            "women": [_num_out(x) for x in inst.irp_women],
        },
        "games": {
            m: {w: dump_game(inst.game(i, j)) for j, w in enumerate(inst.women)}
            for i, m in enumerate(inst.men)
        },
    }


def _strategy_out(desc: Any) -> Any:
    if isinstance(desc, bool):
        raise SchemaError(f"cannot serialize strategy descriptor {desc!r}")
    if isinstance(desc, int):
        return desc
    if isinstance(desc, Fraction):
        return _num_out(desc)
    if isinstance(desc, tuple) and len(desc) == 2:
        return [_num_out(rat(desc[0])), _num_out(rat(desc[1]))]
    raise SchemaError(f"cannot serialize strategy descriptor {desc!r}")


def dump_profile(inst: Instance, profile: MatchingProfile) -> dict:
    """Profile file payload: the matching plus each couple's contract.

    Synthesized contracts (off the menu grid, repeated games only) get
    a null id; everything else is identified by menu id.  Payoffs are
    always included so readers need not rebuild the instance.
    """
    matching = {
        m: (inst.women[profile.matches[i]] if profile.matches[i] is not SINGLE else None)
        for i, m in enumerate(inst.men)
    }
    contracts = {}
    for (i, j), c in sorted(profile.chosen.items()):
        on_menu = c.id < len(inst.game(i, j).menu())
        contracts[inst.men[i]] = {
            "id": c.id if on_menu else None,
            "strategy_a": _strategy_out(c.strategy_a),
            "strategy_b": _strategy_out(c.strategy_b),
            "u": _num_out(c.u),
            "v": _num_out(c.v),
        }
    return {"matching": matching, "contracts": contracts}


def _strategy_in(value: Any, where: str) -> Any:
    if isinstance(value, bool):
        raise SchemaError(f"{where}: invalid strategy descriptor")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        return _num(value, where)
    if isinstance(value, list) and len(value) == 2:
        return (_num(value[0], f"{where}[0]"), _num(value[1], f"{where}[1]"))
    raise SchemaError(f"{where}: invalid strategy descriptor {value!r}")


def parse_profile(inst: Instance, data: Any) -> MatchingProfile:
    """Rebuild a profile against its instance, cross-checking payoffs."""
    obj = _dict(data, "profile")
    _check_keys(obj, "profile", ("matching", "contracts"))
    matching = _dict(obj["matching"], "profile.matching")
    if set(matching) != set(inst.men):
        raise SchemaError("profile.matching: keys must be exactly the men")
    w_index = {w: j for j, w in enumerate(inst.women)}
    matches: List[Optional[int]] = []
    for m in inst.men:
        tgt = matching[m]
        if tgt is None:
            matches.append(None)
            continue
        tgt = _str(tgt, f"profile.matching[{m!r}]")
        if tgt not in w_index:
            raise SchemaError(f"profile.matching[{m!r}]: unknown woman {tgt!r}")
        matches.append(w_index[tgt])

    contracts_obj = _dict(obj["contracts"], "profile.contracts")
    expected = {inst.men[i] for i, j in enumerate(matches) if j is not None}
    if set(contracts_obj) != expected:
        raise SchemaError("profile.contracts: keys must be exactly the matched men")
    chosen = {}
    for i, j in enumerate(matches):
        if j is None:
            continue
        m = inst.men[i]
        where = f"profile.contracts[{m!r}]"
        entry = _dict(contracts_obj[m], where)
        _check_keys(entry, where, ("id", "strategy_a", "strategy_b", "u", "v"))
        game = inst.game(i, j)
        u = _num(entry["u"], f"{where}.u")
        v = _num(entry["v"], f"{where}.v")
        if entry["id"] is not None:
            if isinstance(entry["id"], bool) or not isinstance(entry["id"], int):
                raise SchemaError(f"{where}.id: expected an integer or null")
            try:
                contract = game.contract(entry["id"])
            except GameError as exc:
                raise SchemaError(f"{where}.id: {exc}") from exc
        else:
            if not isinstance(game, RepeatedGame):
                raise SchemaError(f"{where}: null id is only valid for repeated games")
            try:
                contract = game.synthesize_contract((u, v))
            except GameError as exc:
                raise SchemaError(f"{where}: {exc}") from exc
        if (contract.u, contract.v) != (u, v):
            raise SchemaError(
                f"{where}: stored payoffs ({fmt(u)},{fmt(v)}) disagree with "
                f"contract {contract.id} ({fmt(contract.u)},{fmt(contract.v)})"
            )
        a = _strategy_in(entry["strategy_a"], f"{where}.strategy_a")
        b = _strategy_in(entry["strategy_b"], f"{where}.strategy_b")
        if (a, b) != (contract.strategy_a, contract.strategy_b):
            raise SchemaError(f"{where}: strategy descriptors disagree with the contract")
        chosen[(i, j)] = contract
    return MatchingProfile(matches=tuple(matches), chosen=chosen)


def load_profile_file(inst: Instance, path: str) -> MatchingProfile:
    return parse_profile(inst, load_json(path))


def parse_tree(data: Any) -> GameTree:
    """Game tree file: players, nodes keyed by integer id, optional root."""
    obj = _dict(data, "tree")
    _check_keys(obj, "tree", ("players", "nodes"), ("root",))
    players = _names(obj["players"], "tree.players")
    nodes_obj = _dict(obj["nodes"], "tree.nodes")
    nodes: Dict[int, TreeNode] = {}
    player_index = {p: k for k, p in enumerate(players)}
    for key, payload in nodes_obj.items():
        try:
            nid = int(key)
        except ValueError:
            raise SchemaError(f"tree.nodes: node ids are integers, got {key!r}") from None
        where = f"tree.nodes[{key!r}]"
        node = _dict(payload, where)
        if "payoffs" in node:
            _check_keys(node, where, ("payoffs",))
            pay = [_num(x, f"{where}.payoffs[{k}]") for k, x in enumerate(_list(node["payoffs"], f"{where}.payoffs"))]
            nodes[nid] = TerminalNode(payoffs=tuple(pay))
        else:
            _check_keys(node, where, ("player", "children"))
            raw_player = node["player"]
            if isinstance(raw_player, str):
                if raw_player not in player_index:
                    raise SchemaError(f"{where}.player: unknown player {raw_player!r}")
                player = player_index[raw_player]
            elif isinstance(raw_player, int) and not isinstance(raw_player, bool):
                player = raw_player
            else:
                raise SchemaError(f"{where}.player: expected a player name or index")
            kids = _list(node["children"], f"{where}.children")
            children = []
            for k, kid in enumerate(kids):
                if isinstance(kid, bool) or not isinstance(kid, int):
                    raise SchemaError(f"{where}.children[{k}]: expected a node id")
                children.append(kid)
            nodes[nid] = InternalNode(player=player, children=tuple(children))
    root = obj.get("root", 0)
    if isinstance(root, bool) or not isinstance(root, int):
        raise SchemaError("tree.root: expected a node id")
    try:
        return GameTree(players=players, nodes=nodes, root=root)
    except Exception as exc:
        raise SchemaError(f"tree: {exc}") from exc


def load_tree_file(path: str) -> GameTree:
    return parse_tree(load_json(path))


_MODEL_KINDS = ("ordinal", "shapley_shubik", "gale_demange", "contracts")


def _grid_in(value: Any, where: str) -> Tuple[Fraction, Fraction, Fraction]:
    grid = _list(value, where)
    if len(grid) != 3:
        raise SchemaError(f"{where}: expected [min, max, step]")
    return (_num(grid[0], f"{where}[0]"), _num(grid[1], f"{where}[1]"), _num(grid[2], f"{where}[2]"))


def _prefs_in(value: Any, where: str) -> Dict[str, List[str]]:
    obj = _dict(value, where)
    return {
        _str(k, f"{where} key"): [
            _str(x, f"{where}[{k!r}][{n}]") for n, x in enumerate(_list(v, f"{where}[{k!r}]"))
        ]
        for k, v in obj.items()
    }


def parse_model(data: Any, kind: str) -> Instance:
    """Build an instance from a classical-model file of the given kind."""
    if kind not in _MODEL_KINDS:
        raise SchemaError(f"unknown model kind {kind!r}")
    obj = _dict(data, "model")
    if "model" in obj and obj["model"] != kind:
        raise SchemaError(f"model file is tagged {obj['model']!r}, not {kind!r}")
    try:
        if kind == "ordinal":
            _check_keys(obj, "model", ("men", "women"), ("model",))
            return adapters.from_ordinal(
                _prefs_in(obj["men"], "model.men"), _prefs_in(obj["women"], "model.women")
            )
        if kind == "shapley_shubik":
            _check_keys(obj, "model", ("costs", "valuations", "price_grid"), ("model",))
            costs = {
                _str(k, "model.costs key"): _num(v, f"model.costs[{k!r}]")
                for k, v in _dict(obj["costs"], "model.costs").items()
            }
            valuations = {
                _str(s, "model.valuations key"): {
                    _str(b, f"model.valuations[{s!r}] key"): _num(v, f"model.valuations[{s!r}][{b!r}]")
                    for b, v in _dict(row, f"model.valuations[{s!r}]").items()
                }
                for s, row in _dict(obj["valuations"], "model.valuations").items()
            }
            return adapters.from_shapley_shubik(
                costs, valuations, _grid_in(obj["price_grid"], "model.price_grid")
            )
        if kind == "gale_demange":
            _check_keys(obj, "model", ("f", "h", "transfer_grid"), ("model",))

            def maps_in(value: Any, where: str) -> dict:
                return {
                    _str(m, f"{where} key"): {
                        _str(w, f"{where}[{m!r}] key"): _breakpoints(bps, f"{where}[{m!r}][{w!r}]")
                        for w, bps in _dict(row, f"{where}[{m!r}]").items()
                    }
                    for m, row in _dict(value, where).items()
                }

            return adapters.from_gale_demange(
                maps_in(obj["f"], "model.f"),
                maps_in(obj["h"], "model.h"),
                _grid_in(obj["transfer_grid"], "model.transfer_grid"),
            )
        _check_keys(obj, "model", ("contracts", "relations", "prefs"), ("model",))
        contracts = _names(obj["contracts"], "model.contracts")
        relations = {}
        for name, pair in _dict(obj["relations"], "model.relations").items():
            duo = _list(pair, f"model.relations[{name!r}]")
            if len(duo) != 2:
                raise SchemaError(f"model.relations[{name!r}]: expected [man, woman]")
            relations[_str(name, "model.relations key")] = (
                _str(duo[0], f"model.relations[{name!r}][0]"),
                _str(duo[1], f"model.relations[{name!r}][1]"),
            )
        return adapters.from_hatfield_milgrom(
            contracts, relations, _prefs_in(obj["prefs"], "model.prefs")
        )
    except GameError as exc:
        raise SchemaError(f"model: {exc}") from exc


def load_model_file(path: str, kind: str) -> Instance:
    return parse_model(load_json(path), kind)

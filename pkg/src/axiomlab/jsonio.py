"""JSON file formats: instances, profiles, matchings, lotteries, rule tables.

Object names exist only in this layer; everything past it works on dense
integer ids.  Rational weights serialize as lowest-terms ``"p/q"`` strings,
never as floats, so reports are byte-stable and exact end to end.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .errors import FormatError
from .matchings import ImprovementCycle
from .model import GENERAL, NULL_BOTTOM, Instance, Matching
from .preferences import Preference, Profile, enumerate_profiles
from .rules import (
    Lottery,
    RuleDescriptor,
    TabulatedDeterministicRule,
    TabulatedLotteryRule,
    rule_label,
)

ObjectNames = tuple[str, ...]


def default_object_names(inst: Instance) -> ObjectNames:
    if inst.null_object is None:
        return tuple(f"o{i + 1}" for i in range(inst.k))
    return ("null",) + tuple(f"o{i}" for i in range(1, inst.k))


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}: {exc}")


def load_json_file(path: str) -> Any:
    with open(path, encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")


def dump_json_file(path: str, payload: Any) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def instance_to_dict(inst: Instance, names: ObjectNames | None = None) -> dict:
    names = names or default_object_names(inst)
    return {
        "n": inst.n,
        "objects": [
            {"name": names[o], "capacity": inst.capacities[o]} for o in range(inst.k)
        ],
        "null_object": None if inst.null_object is None else names[inst.null_object],
        "domain": inst.domain,
    }


def instance_from_dict(data: dict) -> tuple[Instance, ObjectNames]:
    """Parse an instance object; returns the instance and its object names."""
    if not isinstance(data, dict) or "objects" not in data or "n" not in data:
        raise FormatError("instance JSON needs 'n' and 'objects'")
    names = tuple(str(obj["name"]) for obj in data["objects"])
    if len(set(names)) != len(names):
        raise FormatError(f"duplicate object names: {names}")
    capacities = tuple(int(obj["capacity"]) for obj in data["objects"])
    null_name = data.get("null_object")
    null_object = None
    if null_name is not None:
        if null_name not in names:
            raise FormatError(f"null_object {null_name!r} is not a listed object")
        if names[0] != null_name:
            raise FormatError("the null object must be listed first")
        null_object = 0
    domain = data.get("domain", GENERAL)
    if domain not in (GENERAL, NULL_BOTTOM):
        raise FormatError(f"unknown domain {domain!r}")
    return Instance(int(data["n"]), capacities, null_object, domain), names


def load_instance(path: str) -> tuple[Instance, ObjectNames]:
    """Load an instance file; combined {'instance': ..., 'profile': ...} files work too."""
    data = load_json_file(path)
    if isinstance(data, dict) and "instance" in data:
        data = data["instance"]
    return instance_from_dict(data)


def _object_id(name: str, names: ObjectNames) -> int:
    try:
        return names.index(name)
    except ValueError:
        raise FormatError(f"unknown object name {name!r}; expected one of {list(names)}")


def preference_from_names(entry: list, names: ObjectNames) -> Preference:
    return tuple(_object_id(str(o), names) for o in entry)


def profile_from_dict(data: Any, inst: Instance, names: ObjectNames) -> Profile:
    if isinstance(data, dict) and "profile" in data:
        data = data["profile"]
    if not isinstance(data, list) or len(data) != inst.n:
        raise FormatError(f"profile JSON must list rankings for all {inst.n} agents")
    profile = tuple(preference_from_names(entry, names) for entry in data)
    from .preferences import validate_profile

    validate_profile(inst, profile)
    return profile


def load_profile(path: str, inst: Instance, names: ObjectNames) -> Profile:
    return profile_from_dict(load_json_file(path), inst, names)


def profile_to_lists(profile: Profile, names: ObjectNames) -> list[list[str]]:
    return [[names[o] for o in pref] for pref in profile]


def matching_from_dict(data: Any, inst: Instance, names: ObjectNames) -> Matching:
    if isinstance(data, dict) and "matching" in data:
        data = data["matching"]
    if not isinstance(data, list) or len(data) != inst.n:
        raise FormatError(f"matching JSON must assign all {inst.n} agents")
    return tuple(_object_id(str(o), names) for o in data)


def load_matching(path: str, inst: Instance, names: ObjectNames) -> Matching:
    return matching_from_dict(load_json_file(path), inst, names)


def matching_to_list(matching: Matching, names: ObjectNames) -> list[str]:
    return [names[o] for o in matching]


def lottery_to_list(lottery: Lottery, names: ObjectNames) -> list[dict]:
    return [
        {"matching": matching_to_list(m, names), "weight": format_fraction(w)}
        for m, w in lottery.items()
    ]


def lottery_from_list(data: list, inst: Instance, names: ObjectNames) -> Lottery:
    weights = {}
    for entry in data:
        matching = matching_from_dict(entry["matching"], inst, names)
        weights[matching] = weights.get(matching, Fraction(0)) + parse_fraction(entry["weight"])
    return Lottery(weights)


def cycle_to_dict(cycle: ImprovementCycle, names: ObjectNames) -> dict:
    return {
        "kind": "cycle",
        "agents": list(cycle.agents),
        "objects": [names[o] for o in cycle.objects],
    }


_PROFILE_KEYS = {"profile", "transformed"}
_MATCHING_KEYS = {
    "matching",
    "swapped",
    "outcome",
    "flipped_outcome",
    "dominating",
    "truthful_allotment_vector",
}
_PREFERENCE_KEYS = {"misreport"}
_PREFERENCE_LIST_KEYS = {"misreports"}
_OBJECT_KEYS = {"truthful_allotment", "manipulated_allotment"}
_OBJECT_LIST_KEYS = {"objects"}


def witness_with_names(witness: dict | None, names: ObjectNames) -> dict | None:
    """Replace object ids with names in a witness; agent ids stay numeric."""
    if witness is None:
        return None
    out: dict = {}
    for key, value in witness.items():
        if value is None:
            out[key] = None
        elif key in _PROFILE_KEYS:
            out[key] = profile_to_lists(tuple(tuple(p) for p in value), names)
        elif key in _MATCHING_KEYS:
            out[key] = matching_to_list(tuple(value), names)
        elif key in _PREFERENCE_KEYS:
            out[key] = [names[o] for o in value]
        elif key in _PREFERENCE_LIST_KEYS:
            out[key] = [[names[o] for o in pref] for pref in value]
        elif key in _OBJECT_KEYS:
            out[key] = names[value]
        elif key in _OBJECT_LIST_KEYS:
            out[key] = [names[o] for o in value]
        else:
            out[key] = value
    return out


def rule_to_dict(
    inst: Instance, rule: RuleDescriptor, names: ObjectNames | None = None
) -> dict:
    """Serialize a tabulated rule as one record per profile."""
    names = names or default_object_names(inst)
    if not isinstance(rule, (TabulatedDeterministicRule, TabulatedLotteryRule)):
        raise FormatError(f"only tabulated rules serialize to tables, got {rule_label(rule)}")
    entries = []
    for profile in sorted(rule.table):
        value = rule.table[profile]
        record = {"profile": profile_to_lists(profile, names)}
        if isinstance(rule, TabulatedDeterministicRule):
            record["matching"] = matching_to_list(value, names)
        else:
            record["lottery"] = lottery_to_list(value, names)
        entries.append(record)
    return {
        "kind": "deterministic" if isinstance(rule, TabulatedDeterministicRule) else "lottery",
        "instance": instance_to_dict(inst, names),
        "entries": entries,
    }


def rule_from_dict(data: dict) -> tuple[Instance, ObjectNames, RuleDescriptor]:
    """Load a tabulated rule and validate the table is total over its domain."""
    inst, names = instance_from_dict(data["instance"])
    kind = data.get("kind")
    table: dict = {}
    for record in data["entries"]:
        profile = profile_from_dict(record["profile"], inst, names)
        if kind == "deterministic":
            table[profile] = matching_from_dict(record["matching"], inst, names)
        elif kind == "lottery":
            table[profile] = lottery_from_list(record["lottery"], inst, names)
        else:
            raise FormatError(f"unknown rule kind {kind!r}")
    expected = set(enumerate_profiles(inst))
    if set(table) != expected:
        raise FormatError(
            f"table covers {len(table)} profiles but the domain has {len(expected)}"
        )
    rule: RuleDescriptor
    if kind == "deterministic":
        rule = TabulatedDeterministicRule(table)
    else:
        rule = TabulatedLotteryRule(table)
    return inst, names, rule


def load_rule_file(path: str) -> tuple[Instance, ObjectNames, RuleDescriptor]:
    return rule_from_dict(load_json_file(path))

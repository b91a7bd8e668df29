"""Code specification files: one JSON object per code instance."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .families import build
from .msrbase import InvalidParams

FAMILY_TAGS = ("C0", "YB1", "YB2", "C1", "C2", "C2P", "C3")


@dataclass(frozen=True)
class CodeSpec:
    family: str
    w: int
    r: int
    nbar: int | None = None
    m: int | None = None
    s: int = 1
    q: int | None = None
    seed: int | None = None

    def __post_init__(self):
        fam = self.family.upper()
        if fam not in FAMILY_TAGS:
            raise InvalidParams(f"unknown family {self.family!r}; expected one of {FAMILY_TAGS}")
        object.__setattr__(self, "family", fam)
        if fam in ("C0", "C1"):
            if self.m is None and self.nbar is not None:
                if self.nbar % 2:
                    raise InvalidParams("C0/C1 need an even nbar")
                object.__setattr__(self, "m", self.nbar // 2)
            if self.m is None:
                raise InvalidParams("C0/C1 need m or nbar")
            if self.nbar is None:
                object.__setattr__(self, "nbar", 2 * self.m)
            elif self.nbar != 2 * self.m:
                raise InvalidParams("nbar must equal 2m")
        elif self.nbar is None:
            raise InvalidParams(f"{fam} needs nbar")

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        known = {"family", "w", "r", "nbar", "m", "s", "q", "seed"}
        extra = set(d) - known
        if extra:
            raise InvalidParams(f"unknown spec keys: {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as e:
            raise InvalidParams(str(e)) from None

    @classmethod
    def load(cls, path) -> "CodeSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_q(self, q: int | None) -> "CodeSpec":
        if q is None:
            return self
        return CodeSpec(**{**asdict(self), "q": q})

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def build(self):
        return build(self.family, nbar=self.nbar, m=self.m, w=self.w, r=self.r,
                     s=self.s, q=self.q)

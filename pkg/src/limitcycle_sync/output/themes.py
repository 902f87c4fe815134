"""Colour maps for branches, checks and pass/fail flags."""

from limitcycle_sync.models import Branch
from limitcycle_sync.models.manifest import CheckStatus

BRANCH_COLORS: dict[Branch, str] = {
    Branch.SYNCHRONIZED: "green",
    Branch.UNSYNCHRONIZED: "yellow",
}

CHECK_COLORS: dict[CheckStatus, str] = {
    CheckStatus.MATCH: "green",
    CheckStatus.MISMATCH: "red bold",
    CheckStatus.MISSING: "red",
    CheckStatus.EXTRA: "yellow",
}


def styled_branch(branch: Branch | None) -> str:
    if branch is None:
        return "[red]no-sync[/red]"
    color = BRANCH_COLORS.get(branch, "white")
    return f"[{color}]{branch.value}[/{color}]"


def styled_check(status: CheckStatus) -> str:
    color = CHECK_COLORS.get(status, "white")
    return f"[{color}]{status.value}[/{color}]"


def styled_flag(ok: bool, yes: str = "yes", no: str = "no") -> str:
    return f"[green]{yes}[/green]" if ok else f"[red]{no}[/red]"

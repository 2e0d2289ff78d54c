"""Spec-file generators for the bundled benchmark models.

Board games keep one parameter per cell (``b1`` .. ``bn``) plus the turn
``p`` and one ``move`` summand per position or column.  Each line of the
board gets its own ``wins`` summand, a self-loop enabled while that line is
owned by a single player.  Moves stay possible after a win: blocking them
would make every move summand read the whole board.  The bundled formulas
only look at the first win, so this does not change any verdict.
"""
from __future__ import annotations


class GeneratorError(ValueError):
    pass


def gen_buffer(capacity: int = 2, domain_size: int = 2) -> str:
    """FIFO buffer over ``d1..dN`` with a bounded list, plus the liveness
    formula "every read value is eventually sent"."""
    if capacity < 1 or domain_size < 1:
        raise GeneratorError("capacity and domain size must be at least 1")
    consts = ", ".join(f"d{i}" for i in range(1, domain_size + 1))
    return (
        f"% {capacity}-place buffer over {domain_size} data values\n"
        f"sort D = {{{consts}}};\n"
        f"proc Buffer(q: list(D, {capacity})) =\n"
        f"    sum d: D . #q < {capacity} -> read(d) . Buffer(q := q ++ d)\n"
        f"  + q != [] -> send(head(q)) . Buffer(q := tail(q));\n"
        f"init Buffer([]);\n"
        f"form liveness = nu Y . (forall d: D . [read(d)](mu X . <true>true && [!send(d)]X))\n"
        f"    && [true]Y;\n"
        f"form nodeadlock = nu Z . <true>true && [true]Z;\n"
    )


def _lines(cols: int, rows: int, k: int, index) -> list[list[int]]:
    out = []
    for c in range(cols):
        for r in range(rows):
            for dc, dr in ((1, 0), (0, 1), (1, 1), (1, -1)):
                cells = [(c + j * dc, r + j * dr) for j in range(k)]
                if all(0 <= x < cols and 0 <= y < rows for x, y in cells):
                    out.append([index(x, y) for x, y in cells])
    return out


def _board_spec(name: str, players: tuple[str, str], ncells: int, moves: list[str],
                lines: list[list[int]], full_pass: bool, forms: list[str]) -> str:
    me, opp = players
    cells = ", ".join(f"b{i}: Cell" for i in range(1, ncells + 1))
    out = [
        # the turn shares the cell sort so that "b := p" is well-sorted
        f"sort Cell = {{e, {me}, {opp}}};",
        f"proc {name}({cells}, p: Cell) =",
    ]
    summands = list(moves)
    for ln in lines:
        a = f"b{ln[0]}"
        cond = " && ".join([f"{a} != e"] + [f"b{j} == {a}" for j in ln[1:]])
        summands.append(f"{cond} -> wins({a}) . {name}()")
    if full_pass:
        full = " && ".join(f"b{i} != e" for i in range(1, ncells + 1))
        summands.append(f"{full} && p == {opp} -> move(p) . {name}(p := {me})")
    for k, s in enumerate(summands):
        out.append(("    " if k == 0 else "  + ") + s)
    out[-1] += ";"
    out.append(f"init {name}(" + ", ".join(["e"] * ncells) + f", {me});")
    out.extend(forms)
    return "\n".join(out) + "\n"


def _opp(me: str, opp: str) -> str:
    return f"if(p == {me}, {opp}, {me})"


def gen_tictactoe() -> str:
    """Tic Tac Toe with cells b1..b9 (row-major), X moving first."""
    opp = _opp("X", "O")
    moves = [f"b{k} == e -> move(p) . TicTacToe(b{k} := p, p := {opp})"
             for k in range(1, 10)]
    lines = _lines(3, 3, 3, lambda x, y: 3 * y + x + 1)
    forms = [
        "form xwins = mu Z . [wins(O)]false && <move(X)>(<wins(X)>true || [move(O)]Z);",
    ]
    # a drawn full board is reached after X's move; O passes so that
    # [move(O)]Z is not satisfied vacuously
    return "% Tic Tac Toe; X moves first\n" + _board_spec(
        "TicTacToe", ("X", "O"), 9, moves, lines, True, forms)


def gen_connect_four(cols: int = 4, rows: int = 4, connect: int = 4) -> str:
    """Connect Four on a ``cols`` x ``rows`` board, Yellow moving first.
    ``connect`` is the length of a winning line.

    Cells are numbered column by column from the bottom, so a column's
    cells are adjacent in the state vector.  A move in column ``c`` fills
    its lowest empty cell.
    """
    if cols < 1 or rows < 1 or cols * rows > 42:
        raise GeneratorError("need 1 <= cols*rows <= 42")
    if connect < 2:
        raise GeneratorError("a winning line needs at least 2 cells")

    def cell(c, r):
        return c * rows + r + 1

    opp = _opp("Yellow", "Red")
    moves = []
    for c in range(cols):
        top = f"b{cell(c, rows - 1)}"
        ups = []
        for r in range(rows):
            below_full = [f"b{cell(c, j)} != e" for j in range(r)]
            here = f"b{cell(c, r)} == e"
            cond = " && ".join(below_full + [here])
            ups.append(f"b{cell(c, r)} := if({cond}, p, b{cell(c, r)})")
        ups.append(f"p := {opp}")
        moves.append(f"{top} == e -> move(p) . Four(" + ", ".join(ups) + ")")
    lines = _lines(cols, rows, connect, cell)
    forms = [
        "form yellowwins = mu X . [wins(Red)]false && <move>(<wins(Yellow)>true || [move]X);",
    ]
    title = "Connect Four" if connect == 4 else f"Connect {connect}"
    return (f"% {title}, {cols} columns x {rows} rows; Yellow moves first\n"
            + _board_spec("Four", ("Yellow", "Red"), cols * rows, moves, lines,
                          (cols * rows) % 2 == 1, forms))

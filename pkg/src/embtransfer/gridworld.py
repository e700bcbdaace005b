"""Deterministic 4-move gridworlds whose tasks share one dynamic.

Cells are addressed as ``(x, y)`` with ``x`` the column and ``y`` the row,
``y`` growing downward.  Each free cell gets an integer state id in
row-major order.  Tasks differ only in start/goal placement, so every task
built on one :class:`GridEnv` has the same transition structure.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import numpy as np

Cell = Tuple[int, int]
NeighborMap = Dict[int, Set[int]]

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
ACTIONS = (UP, DOWN, LEFT, RIGHT)
ACTION_NAMES = ("up", "down", "left", "right")
_MOVES = {UP: (0, -1), DOWN: (0, 1), LEFT: (-1, 0), RIGHT: (1, 0)}

LAYOUT_KINDS = ("empty_room", "four_room", "multi_room", "custom")
DEFAULT_MAX_STEPS = {"empty_room": 500, "four_room": 1000, "multi_room": 1000, "custom": 500}


class LayoutError(ValueError):
    """Raised for grids that violate the layout invariants."""


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    walls: FrozenSet[Cell]
    layout_kind: str = "custom"
    start: Optional[Cell] = None
    goal: Optional[Cell] = None

    def is_wall(self, cell: Cell) -> bool:
        x, y = cell
        if not (0 <= x < self.width and 0 <= y < self.height):
            return True
        return cell in self.walls

    def free_cells(self) -> List[Cell]:
        return [(x, y) for y in range(self.height) for x in range(self.width)
                if (x, y) not in self.walls]

    def to_text(self) -> str:
        rows = []
        for y in range(self.height):
            row = []
            for x in range(self.width):
                c = (x, y)
                if c in self.walls:
                    row.append("#")
                elif c == self.start:
                    row.append("S")
                elif c == self.goal:
                    row.append("G")
                else:
                    row.append(".")
            rows.append("".join(row))
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class Task:
    start: int
    goal: int
    max_steps: int

    def __post_init__(self):
        if self.start == self.goal:
            raise LayoutError("task start and goal must differ")
        if self.max_steps < 1:
            raise LayoutError("max_steps must be positive")


@dataclass(frozen=True)
class StepOutcome:
    next_state: int
    extrinsic_reward: float
    done: bool
    step_index: int


def _border(width: int, height: int) -> Set[Cell]:
    walls = set()
    for x in range(width):
        walls.add((x, 0))
        walls.add((x, height - 1))
    for y in range(height):
        walls.add((0, y))
        walls.add((width - 1, y))
    return walls


def empty_room(size: int = 10) -> GridSpec:
    """Open room with ``size x size`` free interior cells."""
    n = size + 2
    return GridSpec(n, n, frozenset(_border(n, n)), "empty_room")


def four_room(size: int = 13) -> GridSpec:
    """Four rooms split by a central cross of walls with one doorway per arm."""
    if size < 7 or size % 2 == 0:
        raise LayoutError("four_room needs an odd size >= 7")
    walls = _border(size, size)
    mid = size // 2
    for i in range(1, size - 1):
        walls.add((mid, i))
        walls.add((i, mid))
    lo, hi = (mid + 1) // 2, mid + (mid + 1) // 2
    for door in [(mid, lo), (mid, hi), (lo, mid), (hi, mid)]:
        walls.discard(door)
    return GridSpec(size, size, frozenset(walls), "four_room")


def multi_room(room: int = 7, n_rooms: int = 3) -> GridSpec:
    """``n_rooms`` square rooms chained left to right by single doorways."""
    width = n_rooms * (room + 1) + 1
    height = room + 2
    walls = _border(width, height)
    for k in range(1, n_rooms):
        x = k * (room + 1)
        for y in range(1, height - 1):
            walls.add((x, y))
        # alternate doorway rows so the shortest path zig-zags
        door_y = 1 + (room - 1) * (k % 2) if room > 2 else 1
        walls.discard((x, door_y))
    return GridSpec(width, height, frozenset(walls), "multi_room")


def make_layout(kind: str, **kwargs) -> GridSpec:
    builders = {"empty_room": empty_room, "four_room": four_room, "multi_room": multi_room}
    try:
        return builders[kind](**kwargs)
    except KeyError:
        raise LayoutError(f"unknown layout kind {kind!r}") from None


def parse_layout(text: str, layout_kind: str = "custom") -> GridSpec:
    """Parse a text map: ``#`` wall, ``.`` free, ``S`` start, ``G`` goal."""
    rows = [r.rstrip("\r") for r in text.splitlines() if r.strip()]
    if not rows:
        raise LayoutError("empty layout")
    width = len(rows[0])
    walls, start, goal = set(), None, None
    for y, row in enumerate(rows):
        if len(row) != width:
            raise LayoutError(f"row {y} has length {len(row)}, expected {width}")
        for x, ch in enumerate(row):
            if ch == "#":
                walls.add((x, y))
            elif ch == "S":
                if start is not None:
                    raise LayoutError("multiple start cells")
                start = (x, y)
            elif ch == "G":
                if goal is not None:
                    raise LayoutError("multiple goal cells")
                goal = (x, y)
            elif ch != ".":
                raise LayoutError(f"unknown map character {ch!r} at ({x}, {y})")
    return GridSpec(width, len(rows), frozenset(walls), layout_kind, start, goal)


def load_layout(path) -> GridSpec:
    return parse_layout(Path(path).read_text())


class GridEnv:
    """Environment built from a validated :class:`GridSpec`.

    ``move`` is the pure transition function; ``reset``/``step`` wrap it with
    the episode bookkeeping (step counter, goal test, reward).
    """

    def __init__(self, spec: GridSpec):
        self.spec = spec
        self.cells: List[Cell] = spec.free_cells()
        self.state_of: Dict[Cell, int] = {c: i for i, c in enumerate(self.cells)}
        self.n_states = len(self.cells)
        self.n_actions = len(ACTIONS)
        self._next = np.empty((self.n_states, self.n_actions), dtype=np.int64)
        for s, (x, y) in enumerate(self.cells):
            for a, (dx, dy) in _MOVES.items():
                target = (x + dx, y + dy)
                self._next[s, a] = self.state_of.get(target, s)
        self.task: Optional[Task] = None
        self.state: Optional[int] = None
        self.step_index = 0
        self.done = True

    @property
    def default_max_steps(self) -> int:
        return DEFAULT_MAX_STEPS.get(self.spec.layout_kind, 500)

    def move(self, s: int, a: int) -> int:
        return int(self._next[s, a])

    def transition_table(self) -> np.ndarray:
        return self._next.copy()

    def reset(self, task: Task) -> int:
        for s in (task.start, task.goal):
            if not 0 <= s < self.n_states:
                raise LayoutError(f"state id {s} outside the free cells")
        self.task = task
        self.state = task.start
        self.step_index = 0
        self.done = False
        return self.state

    def step(self, a: int) -> StepOutcome:
        if self.done or self.task is None:
            raise RuntimeError("step() called on a finished episode; call reset()")
        s_next = self.move(self.state, a)
        self.step_index += 1
        reached = s_next == self.task.goal
        reward = goal_reward(self.step_index, self.task.max_steps) if reached else 0.0
        self.done = reached or self.step_index >= self.task.max_steps
        self.state = s_next
        return StepOutcome(s_next, reward, self.done, self.step_index)

    def one_hot(self, s: int) -> np.ndarray:
        v = np.zeros(self.n_states)
        v[s] = 1.0
        return v


def goal_reward(n_e: int, n_max: int) -> float:
    """Reward on reaching the goal after ``n_e`` of at most ``n_max`` steps."""
    return 1.0 - 0.9 * (n_e / n_max)


def _components(spec: GridSpec) -> int:
    free = set(spec.free_cells())
    seen: Set[Cell] = set()
    count = 0
    for c in free:
        if c in seen:
            continue
        count += 1
        queue = deque([c])
        seen.add(c)
        while queue:
            x, y = queue.popleft()
            for dx, dy in _MOVES.values():
                nb = (x + dx, y + dy)
                if nb in free and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
    return count


def build_env(spec: GridSpec) -> GridEnv:
    """Validate ``spec`` and build its environment.

    Raises LayoutError if the free cells are disconnected, a border cell is
    free, or a declared start/goal lies on a wall.
    """
    if spec.width < 3 or spec.height < 3:
        raise LayoutError("grid must be at least 3x3")
    for c in _border(spec.width, spec.height):
        if c not in spec.walls:
            raise LayoutError(f"border cell {c} must be a wall")
    for name, c in (("start", spec.start), ("goal", spec.goal)):
        if c is not None and spec.is_wall(c):
            raise LayoutError(f"{name} cell {c} is inside a wall")
    if spec.start is not None and spec.start == spec.goal:
        raise LayoutError("start and goal coincide")
    if not spec.free_cells():
        raise LayoutError("grid has no free cells")
    if _components(spec) != 1:
        raise LayoutError("free cells are not a single connected component")
    return GridEnv(spec)


def sample_task(env: GridEnv, rng: np.random.Generator, max_steps: Optional[int] = None) -> Task:
    """Uniformly random ordered pair of distinct free cells."""
    if env.n_states < 2:
        raise LayoutError("need at least two free cells to sample a task")
    start = int(rng.integers(env.n_states))
    goal = int(rng.integers(env.n_states - 1))
    if goal >= start:
        goal += 1
    return Task(start, goal, max_steps or env.default_max_steps)


def spec_task(env: GridEnv, max_steps: Optional[int] = None) -> Task:
    """Task taken from the ``S``/``G`` markers of the layout."""
    if env.spec.start is None or env.spec.goal is None:
        raise LayoutError("layout does not declare both start and goal")
    return Task(env.state_of[env.spec.start], env.state_of[env.spec.goal],
                max_steps or env.default_max_steps)


def true_binary_dynamics(env: GridEnv) -> NeighborMap:
    """Exact one-step reachable sets, self included when some move bumps a wall."""
    return {s: {env.move(s, a) for a in ACTIONS} for s in range(env.n_states)}


def edge_set(neighbors: NeighborMap) -> Set[Tuple[int, int]]:
    return {(s, t) for s, nbs in neighbors.items() for t in nbs}


def shortest_path_lengths(env: GridEnv, goal: int) -> np.ndarray:
    """BFS distance (in moves) from every state to ``goal``."""
    dist = np.full(env.n_states, -1, dtype=np.int64)
    dist[goal] = 0
    queue = deque([goal])
    dyn = true_binary_dynamics(env)
    # moves are reversible on a 4-connected grid, so forward edges serve as reverse edges
    while queue:
        s = queue.popleft()
        for t in dyn[s]:
            if dist[t] < 0:
                dist[t] = dist[s] + 1
                queue.append(t)
    return dist

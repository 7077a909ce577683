"""First-order graph-viscosity discretization on uniform structured grids.

Nodes sit at cell centers; each node exchanges with its axis neighbors
through antisymmetric coefficients c_ij of magnitude (face area)/2, and the
update

    U_i(t+dt) = U_i - (dt/m_i) sum_j [ (f(U_j) + f(U_i)) . c_ij
                                       - d_ij (U_j - U_i) ]

with d_ij = lambda_hat_ij |c_ij| is algebraically a convex combination of the
previous states and the pairwise Riemann averages (bar states), so one
forward-Euler step with dt below the CFL bound inherits every convex
invariant of the bar states: positive density, energy above the cold curve
and the local minimum principle on the entropy surrogate.

Boundary handling uses one layer of ghost nodes filled by the boundary
condition object (see eulerkit.timeloop); ghost edges are assembled exactly
like interior ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .eos import ADMISSIBILITY_RTOL, EosModel

__all__ = [
    "ConservedState",
    "Mesh",
    "FieldState",
    "make_mesh_1d",
    "make_mesh_2d",
    "conserved_from_primitive",
    "euler_flux",
    "flux_normal",
    "bar_state",
    "compute_dij",
    "forward_euler_update",
    "cfl_dt",
    "TimeStepError",
    "InvariantViolationError",
]


class TimeStepError(RuntimeError):
    """dt violates the convex-combination (CFL) bound."""


class InvariantViolationError(RuntimeError):
    """A produced state left the admissible set; carries node index."""

    def __init__(self, message, node=None, diagnostics=None):
        super().__init__(message)
        self.node = node
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class ConservedState:
    """Conserved variables at one node: density, momentum, total energy."""

    rho: float
    momentum: np.ndarray
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "momentum", np.atleast_1d(np.asarray(self.momentum, dtype=np.float64)))

    @property
    def dim(self):
        return self.momentum.shape[0]

    def velocity(self):
        return self.momentum / self.rho

    def specific_internal_energy(self):
        return self.energy / self.rho - 0.5 * float(self.momentum @ self.momentum) / self.rho**2


def conserved_from_primitive(model: EosModel, rho, velocity, p) -> ConservedState:
    v = np.atleast_1d(np.asarray(velocity, dtype=np.float64))
    e = model.energy_from_pressure(1.0 / rho, p)
    return ConservedState(rho=float(rho), momentum=rho * v, energy=rho * e + 0.5 * rho * float(v @ v))


@dataclass(frozen=True)
class Mesh:
    """Uniform 1D interval or 2D structured quad grid, cell-centered nodes.

    ``edge_weight[k]`` is |c_ij| for axis-k edges (face area / 2); the lumped
    node mass is the cell volume.
    """

    dim: int
    shape: tuple
    origin: tuple
    spacing: tuple

    @property
    def node_mass(self) -> float:
        m = 1.0
        for h in self.spacing:
            m *= h
        return m

    @property
    def edge_weight(self) -> tuple:
        if self.dim == 1:
            return (0.5,)
        hx, hy = self.spacing
        return (0.5 * hy, 0.5 * hx)

    @property
    def n_nodes(self) -> int:
        n = 1
        for s in self.shape:
            n *= s
        return n

    def axis_centers(self, axis: int) -> np.ndarray:
        n = self.shape[axis]
        return self.origin[axis] + (np.arange(n) + 0.5) * self.spacing[axis]

    def coords(self):
        """1D: x array; 2D: (X, Y) arrays of shape ``shape`` (ij indexing)."""
        if self.dim == 1:
            return self.axis_centers(0)
        return np.meshgrid(self.axis_centers(0), self.axis_centers(1), indexing="ij")


def make_mesh_1d(x0: float, x1: float, cells: int) -> Mesh:
    if cells < 2:
        raise ValueError("need at least 2 cells")
    return Mesh(dim=1, shape=(cells,), origin=(x0,), spacing=((x1 - x0) / cells,))


def make_mesh_2d(x0, x1, y0, y1, nx: int, ny: int) -> Mesh:
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 cells per direction")
    return Mesh(dim=2, shape=(nx, ny), origin=(x0, y0), spacing=((x1 - x0) / nx, (y1 - y0) / ny))


@dataclass
class FieldState:
    """Nodal conserved fields plus the time they represent.

    ``mom`` has shape (dim,) + mesh.shape so each component is contiguous.
    """

    rho: np.ndarray
    mom: np.ndarray
    energy: np.ndarray
    t: float

    @property
    def dim(self):
        return self.mom.shape[0]

    def copy(self):
        return FieldState(self.rho.copy(), self.mom.copy(), self.energy.copy(), self.t)

    def velocity(self):
        return self.mom / self.rho

    def specific_internal_energy(self):
        ke = 0.5 * np.sum(self.mom * self.mom, axis=0) / self.rho
        return (self.energy - ke) / self.rho

    def state(self, index) -> ConservedState:
        return ConservedState(
            rho=float(self.rho[index]),
            momentum=np.asarray([self.mom[k][index] for k in range(self.dim)], dtype=np.float64),
            energy=float(self.energy[index]),
        )

    def totals(self, mesh: Mesh):
        """(mass, momentum vector, energy) integrated over the mesh."""
        m = mesh.node_mass
        return (
            m * float(np.sum(self.rho)),
            m * np.array([float(np.sum(self.mom[k])) for k in range(self.dim)]),
            m * float(np.sum(self.energy)),
        )


def field_from_function(model: EosModel, mesh: Mesh, primitive_fn, t=0.0) -> FieldState:
    """Sample (rho, v, p) = primitive_fn(coords) at cell centers."""
    if mesh.dim == 1:
        x = mesh.axis_centers(0)
        rho, v, p = primitive_fn(x)
        rho = np.broadcast_to(np.asarray(rho, dtype=np.float64), x.shape).copy()
        v = np.broadcast_to(np.asarray(v, dtype=np.float64), x.shape).copy()
        p = np.broadcast_to(np.asarray(p, dtype=np.float64), x.shape).copy()
        e = np.asarray(model.energy_from_pressure(1.0 / rho, p))
        mom = (rho * v)[None, :]
        en = rho * e + 0.5 * rho * v * v
        return FieldState(rho, np.ascontiguousarray(mom), en, t)
    xx, yy = mesh.coords()
    rho, vx, vy, p = primitive_fn(xx, yy)
    rho = np.broadcast_to(np.asarray(rho, dtype=np.float64), xx.shape).copy()
    vx = np.broadcast_to(np.asarray(vx, dtype=np.float64), xx.shape).copy()
    vy = np.broadcast_to(np.asarray(vy, dtype=np.float64), xx.shape).copy()
    p = np.broadcast_to(np.asarray(p, dtype=np.float64), xx.shape).copy()
    e = np.asarray(model.energy_from_pressure(1.0 / rho, p))
    mom = np.stack([rho * vx, rho * vy])
    en = rho * e + 0.5 * rho * (vx * vx + vy * vy)
    return FieldState(rho, np.ascontiguousarray(mom), en, t)


# ---------------------------------------------------------------------------
# pointwise operations
# ---------------------------------------------------------------------------


def euler_flux(model: EosModel, u: ConservedState) -> np.ndarray:
    """Flux tensor of shape (d+2, d): rows mass, momentum block, energy."""
    d = u.dim
    v = u.velocity()
    tau = 1.0 / u.rho
    p = model.pressure(tau, u.specific_internal_energy())
    out = np.empty((d + 2, d))
    out[0, :] = u.momentum
    out[1 : 1 + d, :] = np.outer(v, u.momentum) + p * np.eye(d)
    out[1 + d, :] = v * (u.energy + p)
    return out


def flux_normal(model: EosModel, u: ConservedState, normal) -> np.ndarray:
    """g(u) n as a (d+2,) vector in conserved ordering."""
    n = np.asarray(normal, dtype=np.float64)
    return euler_flux(model, u) @ n


def bar_state(model: EosModel, u_l: ConservedState, u_r: ConservedState, normal, lam: float) -> ConservedState:
    """Riemann-fan average 0.5(uL+uR) - (g(uR)n - g(uL)n)/(2 lam)."""
    if not lam > 0.0:
        raise ValueError(f"wave speed must be positive, got {lam!r}")
    gl = flux_normal(model, u_l, normal)
    gr = flux_normal(model, u_r, normal)
    d = u_l.dim
    avg_rho = 0.5 * (u_l.rho + u_r.rho) - (gr[0] - gl[0]) / (2.0 * lam)
    avg_mom = 0.5 * (u_l.momentum + u_r.momentum) - (gr[1 : 1 + d] - gl[1 : 1 + d]) / (2.0 * lam)
    avg_e = 0.5 * (u_l.energy + u_r.energy) - (gr[1 + d] - gl[1 + d]) / (2.0 * lam)
    return ConservedState(rho=avg_rho, momentum=avg_mom, energy=avg_e)


# ---------------------------------------------------------------------------
# stage workspace shared by the public ops and the time integrator
# ---------------------------------------------------------------------------


class StageWorkspace:
    """Preallocated padded arrays and kernel bindings for one mesh/model."""

    def __init__(self, model: EosModel, mesh: Mesh):
        self.model = model
        self.mesh = mesh
        self.tag, self.par = model.kernel_args()
        self.der = _kernels.derived_constants(self.tag, self.par)
        self.kern = _kernels.kernels_for(mesh.n_nodes)
        if mesh.dim == 1:
            # windowed sweeps pick the flavor by how much work they carry
            self._kern_of = _kernels.kernels_for
        else:
            self._kern_of = lambda n: self.kern
        self.chunk_mins = np.empty((_kernels.FUSED_CHUNKS, 3))
        # minima of (admissibility margin, pressure, bulk modulus) over the
        # nodes touched by the latest evaluate
        self.stage_min_margin = np.inf
        self.stage_min_pressure = np.inf
        self.stage_min_bulk = np.inf
        # non-strict mode records cold-curve violations instead of raising
        # (density/hyperbolicity failures always raise: nothing to compute)
        self.strict = True
        self.worst_margin_seen = np.inf
        if mesh.dim == 1:
            n = mesh.shape[0]
            pshape = (n + 2,)
            eshape = (n + 1,)
        else:
            nx, ny = mesh.shape
            pshape = (nx + 2, ny + 2)
        self.rho_p = np.empty(pshape)
        self.en_p = np.empty(pshape)
        self.p = np.empty(pshape)
        self.kk = np.empty(pshape)
        self.c = np.empty(pshape)
        self.lk = np.empty(pshape)
        self.sq = np.empty(pshape)
        self.margin = np.empty(pshape)
        self.ik = np.empty(pshape)
        if mesh.dim == 1:
            self.mx_p = np.empty(pshape)
            self.v = np.empty(pshape)
            self.lam = np.empty(eshape)
            self.g = [np.empty(eshape) for _ in range(3)]
        else:
            nx, ny = mesh.shape
            self.mx_p = np.empty(pshape)
            self.my_p = np.empty(pshape)
            self.vx_a = np.empty(pshape)
            self.vy_a = np.empty(pshape)
            self.lam_x = np.empty((nx + 1, ny))
            self.lam_y = np.empty((nx, ny + 1))
            self.gx = [np.empty((nx + 1, ny)) for _ in range(4)]
            self.gy = [np.empty((nx, ny + 1)) for _ in range(4)]

    # -- loading ------------------------------------------------------------
    #
    # 1D methods take an optional window (a, b): only real nodes in [a, b)
    # may change this stage, so array work is restricted to the padded slice
    # [a, b+2).  Callers guarantee (i) the first load of a run is full and
    # (ii) every loaded field agrees with the previously loaded one outside
    # the window, which keeps the untouched padded contents valid.

    def _win(self, win):
        n = self.mesh.shape[0]
        if win is None:
            return 0, n
        a, b = win
        return max(int(a), 0), min(int(b), n)

    def load(self, field: FieldState, bc, t: float, win=None):
        mesh = self.mesh
        if mesh.dim == 1:
            a, b = self._win(win)
            self.rho_p[a + 1 : b + 1] = field.rho[a:b]
            self.mx_p[a + 1 : b + 1] = field.mom[0][a:b]
            self.en_p[a + 1 : b + 1] = field.energy[a:b]
            bc.fill_ghosts_1d(self.model, mesh, t, self.rho_p, self.mx_p, self.en_p)
        else:
            self.rho_p[1:-1, 1:-1] = field.rho
            self.mx_p[1:-1, 1:-1] = field.mom[0]
            self.my_p[1:-1, 1:-1] = field.mom[1]
            self.en_p[1:-1, 1:-1] = field.energy
            bc.fill_ghosts_2d(self.model, mesh, t, self.rho_p, self.mx_p, self.my_p, self.en_p)
            # corners are never touched by the 5-point stencil
            for a in (0, -1):
                for b in (0, -1):
                    self.rho_p[a, b] = self.rho_p[1, 1]
                    self.mx_p[a, b] = self.mx_p[1, 1]
                    self.my_p[a, b] = self.my_p[1, 1]
                    self.en_p[a, b] = self.en_p[1, 1]

    def evaluate(self, win=None, fused=True):
        """Node + edge passes; raises if the loaded field is inadmissible.

        In 1D the default is one fused sweep that leaves only the edge
        outputs (wave speeds, interface fluxes) and the stage minima;
        ``fused=False`` additionally materializes the per-node quantity
        arrays (diagnostics and tests).
        """
        if self.mesh.dim == 1:
            a, b = self._win(win)
            kern = self._kern_of(b - a)
            sl = np.s_[a : b + 2]
            if not np.all(self.rho_p[sl] > 0.0):
                node = a + int(np.argmax(~(self.rho_p[sl] > 0.0))) - 1
                raise InvariantViolationError(
                    f"non-positive density at node {node}", node=node,
                    diagnostics={"rho": float(self.rho_p[node + 1])},
                )
            el = np.s_[a : b + 1]
            if fused:
                kern["fused_1d"](
                    self.tag, self.par, self.der, self.rho_p[sl], self.mx_p[sl], self.en_p[sl],
                    self.mesh.edge_weight[0], self.lam[el],
                    self.g[0][el], self.g[1][el], self.g[2][el], self.chunk_mins,
                )
                self.stage_min_margin = float(np.min(self.chunk_mins[:, 0]))
                self.stage_min_pressure = float(np.min(self.chunk_mins[:, 1]))
                self.stage_min_bulk = float(np.min(self.chunk_mins[:, 2]))
            else:
                kern["node_1d"](
                    self.tag, self.par, self.der, self.rho_p[sl], self.mx_p[sl], self.en_p[sl],
                    self.p[sl], self.kk[sl], self.c[sl], self.lk[sl], self.sq[sl], self.margin[sl],
                    self.v[sl], self.ik[sl],
                )
                kern["edge_1d"](
                    self.rho_p[sl], self.mx_p[sl], self.en_p[sl], self.p[sl], self.kk[sl],
                    self.c[sl], self.lk[sl], self.sq[sl], self.v[sl], self.ik[sl],
                    self.mesh.edge_weight[0], self.lam[el], self.g[0][el], self.g[1][el], self.g[2][el],
                )
                self.stage_min_margin = float(np.min(self.margin[sl]))
                self.stage_min_pressure = float(np.min(self.p[sl]))
                self.stage_min_bulk = float(np.min(self.kk[sl]))
            self._check_stage_mins(win)
        else:
            if not np.all(self.rho_p > 0.0):
                flat = int(np.argmax(~(self.rho_p > 0.0)))
                raise InvariantViolationError("non-positive density", node=flat)
            self.kern["node_2d"](
                self.tag, self.par, self.der, self.rho_p, self.mx_p, self.my_p, self.en_p,
                self.p, self.kk, self.c, self.lk, self.sq, self.margin,
                self.vx_a, self.vy_a, self.ik,
            )
            self.stage_min_margin = float(np.min(self.margin))
            self.stage_min_pressure = float(np.min(self.p))
            self.stage_min_bulk = float(np.min(self.kk))
            self._check_stage_mins(None)
            wx, wy = self.mesh.edge_weight
            self.kern["edge_2d_x"](
                self.rho_p, self.mx_p, self.my_p, self.en_p, self.p, self.kk, self.c, self.lk,
                self.sq, self.vx_a, self.vy_a, self.ik,
                wx, self.lam_x, self.gx[0], self.gx[1], self.gx[2], self.gx[3],
            )
            self.kern["edge_2d_y"](
                self.rho_p, self.mx_p, self.my_p, self.en_p, self.p, self.kk, self.c, self.lk,
                self.sq, self.vx_a, self.vy_a, self.ik,
                wy, self.lam_y, self.gy[0], self.gy[1], self.gy[2], self.gy[3],
            )

    def _check_stage_mins(self, win):
        self.worst_margin_seen = min(self.worst_margin_seen, self.stage_min_margin)
        if not self.strict and self.stage_min_margin < 0.0 and self.stage_min_bulk > 0.0:
            return
        if self.stage_min_margin < 0.0 or not self.stage_min_bulk > 0.0:
            # slow, array-filling pass pins down the offending node
            if self.mesh.dim == 1:
                a, b = self._win(win)
                sl = np.s_[a : b + 2]
                kern = self._kern_of(b - a)
                kern["node_1d"](
                    self.tag, self.par, self.der, self.rho_p[sl], self.mx_p[sl], self.en_p[sl],
                    self.p[sl], self.kk[sl], self.c[sl], self.lk[sl], self.sq[sl], self.margin[sl],
                    self.v[sl], self.ik[sl],
                )
                offset = a
            else:
                sl = np.s_[:]
                offset = 0
            margin = self.margin[sl]
            worst = int(np.argmin(np.ravel(margin)))
            val = float(np.ravel(margin)[worst])
            r = float(np.ravel(self.rho_p[sl])[worst])
            e_scale = abs(float(np.ravel(self.en_p[sl])[worst]) / r) + 1.0
            if val < -ADMISSIBILITY_RTOL * e_scale:
                raise InvariantViolationError(
                    f"energy below the cold curve by {val!r} near node {offset + worst - 1}",
                    node=offset + worst - 1,
                    diagnostics={"margin": val},
                )
            if not float(np.min(self.kk[sl])) > 0.0:
                raise InvariantViolationError("non-positive or non-finite bulk modulus")

    # -- reductions -----------------------------------------------------------

    def sum_d(self):
        """Per-node sum of edge viscosities d_ij (ghost edges included)."""
        mesh = self.mesh
        if mesh.dim == 1:
            w = mesh.edge_weight[0]
            return w * (self.lam[:-1] + self.lam[1:])
        wx, wy = mesh.edge_weight
        return wx * (self.lam_x[:-1, :] + self.lam_x[1:, :]) + wy * (
            self.lam_y[:, :-1] + self.lam_y[:, 1:]
        )

    def dt_bound(self) -> float:
        """Largest dt keeping every self-weight omega_ii nonnegative."""
        return self.mesh.node_mass / (2.0 * float(np.max(self.sum_d())))

    def max_lambda(self, win) -> float:
        """Largest edge wave speed among the window's freshly computed edges."""
        a, b = self._win(win)
        return float(np.max(self.lam[a : b + 1]))

    # -- update ---------------------------------------------------------------

    def apply(self, dt: float, t_new: float, win=None, out: FieldState | None = None) -> FieldState:
        """Difference the edge fluxes into a new (or provided) field."""
        mesh = self.mesh
        dtm = dt / mesh.node_mass
        if mesh.dim == 1:
            n = mesh.shape[0]
            a, b = self._win(win)
            if out is None:
                out = FieldState(np.empty(n), np.empty((1, n)), np.empty(n), t_new)
                if (a, b) != (0, n):
                    raise ValueError("windowed apply needs a preloaded output field")
            out.t = t_new
            self._kern_of(b - a)["update_1d"](
                self.rho_p[a : b + 2], self.mx_p[a : b + 2], self.en_p[a : b + 2],
                self.g[0][a : b + 1], self.g[1][a : b + 1], self.g[2][a : b + 1],
                dtm, out.rho[a:b], out.mom[0][a:b], out.energy[a:b],
            )
            return out
        nx, ny = mesh.shape
        rho_o = np.empty((nx, ny))
        mx_o = np.empty((nx, ny))
        my_o = np.empty((nx, ny))
        en_o = np.empty((nx, ny))
        self.kern["update_2d"](
            self.rho_p, self.mx_p, self.my_p, self.en_p,
            self.gx[0], self.gx[1], self.gx[2], self.gx[3],
            self.gy[0], self.gy[1], self.gy[2], self.gy[3],
            dtm, rho_o, mx_o, my_o, en_o,
        )
        return FieldState(rho_o, np.ascontiguousarray(np.stack([mx_o, my_o])), en_o, t_new)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def compute_dij(model: EosModel, field: FieldState, mesh: Mesh, bc=None):
    """Symmetric edge viscosities d_ij = lambda_hat |c_ij| over interior edges.

    Returns one array per axis; entry k couples nodes k and k+1 along that
    axis.  Values for orientation (i,j) and (j,i) coincide bitwise because
    each edge is evaluated once.
    """
    ws = StageWorkspace(model, mesh)
    ws.load(field, bc or _ZeroGradientGhosts(), field.t)
    ws.evaluate()
    if mesh.dim == 1:
        return (mesh.edge_weight[0] * ws.lam[1:-1],)
    return (
        mesh.edge_weight[0] * ws.lam_x[1:-1, :],
        mesh.edge_weight[1] * ws.lam_y[:, 1:-1],
    )


class _ZeroGradientGhosts:
    """Fallback ghost filler: copy the adjacent real node."""

    kind = "do_nothing"

    def fill_ghosts_1d(self, model, mesh, t, rho, mx, en):
        for arr in (rho, mx, en):
            arr[0] = arr[1]
            arr[-1] = arr[-2]

    def fill_ghosts_2d(self, model, mesh, t, rho, mx, my, en):
        for arr in (rho, mx, my, en):
            arr[0, :] = arr[1, :]
            arr[-1, :] = arr[-2, :]
            arr[:, 0] = arr[:, 1]
            arr[:, -1] = arr[:, -2]

    def post_update(self, model, mesh, field):
        return field


def cfl_dt(model: EosModel, field: FieldState, mesh: Mesh, cfl: float, bc=None) -> float:
    """Largest stable dt scaled by the CFL number."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl!r}")
    ws = StageWorkspace(model, mesh)
    ws.load(field, bc or _ZeroGradientGhosts(), field.t)
    ws.evaluate()
    return cfl * ws.dt_bound()

def forward_euler_update(model: EosModel, field: FieldState, mesh: Mesh, dt: float, bc=None,
                         *, check_output: bool = True, workspace: StageWorkspace | None = None) -> FieldState:
    """One forward-Euler step of the graph-viscosity scheme.

    Raises TimeStepError when dt exceeds the convex-combination bound and
    InvariantViolationError when an inadmissible state is produced (checked
    against the cold curve when ``check_output``).
    """
    bc = bc or _ZeroGradientGhosts()
    ws = workspace or StageWorkspace(model, mesh)
    ws.load(field, bc, field.t)
    ws.evaluate()
    bound = ws.dt_bound()
    if dt > bound * (1.0 + 1e-12):
        raise TimeStepError(f"dt={dt!r} exceeds the convex-combination bound {bound!r}")
    out = ws.apply(dt, field.t + dt)
    if check_output:
        validate_field(model, out)
    return out


def validate_field(model: EosModel, field: FieldState):
    """Raise InvariantViolationError if any node is outside the admissible set."""
    if not np.all(field.rho > 0.0):
        node = int(np.argmax(~(field.rho > 0.0)))
        raise InvariantViolationError(f"non-positive density at node {node}", node=node)
    e = field.specific_internal_energy()
    margin = np.asarray(e) - np.asarray(model.cold_energy(1.0 / field.rho))
    tol = ADMISSIBILITY_RTOL * (np.abs(e) + 1.0)
    bad = margin < -tol
    if np.any(bad):
        node = int(np.argmax(bad))
        raise InvariantViolationError(
            f"energy below the cold curve at node {node}",
            node=node,
            diagnostics={"margin": float(np.ravel(margin)[node])},
        )

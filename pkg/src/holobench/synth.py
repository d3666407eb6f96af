"""Measurement simulator: device output fields, fringe formation, camera frames.

Two acquisition schemes are modeled. The spatial scheme interferes the signal
with a single tilted reference and splits the two polarizations onto the left
(X) and right (Y) halves of the camera (ideal Wollaston). The angular scheme
overlaps both polarizations on the full camera against two orthogonally
polarized references at distinct tilts.

Intensity is always formed as the squared norm of the total Jones vector per
pixel, so cross terms between imperfectly orthogonal references show up on
their own rather than by explicit construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GridMismatch, SaturationWarning
from .field import ComplexField, Grid2D, JonesField, SpatialFrequency, plane_wave
from .modes import ModeBasis

__all__ = [
    "POLS",
    "ReferenceBeam",
    "CameraModel",
    "CameraFrame",
    "SpatialScheme",
    "AngularScheme",
    "Scheme",
    "DeviceModel",
    "SimulatedMeasurement",
    "default_spatial_scheme",
    "default_angular_scheme",
    "synth_output_field",
    "render_intensity",
    "render_frame",
    "simulate_measurement",
    "random_lantern_matrix",
]

POLS = ("X", "Y")


def _check_pol(pol: str) -> int:
    if pol not in POLS:
        raise ValueError(f"polarization must be one of {POLS}, got {pol!r}")
    return POLS.index(pol)


@dataclass(frozen=True)
class ReferenceBeam:
    """Plane-wave reference: polarization state, tilt carrier, global phase.

    The Jones vector fixes the polarization axis only; beam amplitude comes
    from the scheme (explicit ``ref_amplitude`` or the per-frame auto rule).
    """

    jones: tuple[complex, complex]
    carrier: SpatialFrequency
    phase0: float = 0.0

    def __post_init__(self) -> None:
        norm = np.hypot(abs(self.jones[0]), abs(self.jones[1]))
        if not norm > 0:
            raise ValueError("reference Jones vector must be nonzero")

    def unit_jones(self) -> np.ndarray:
        v = np.array(self.jones, dtype=np.complex128)
        return v / np.linalg.norm(v)


@dataclass(frozen=True)
class CameraModel:
    """Quantizing intensity camera with optional additive Gaussian noise.

    ``full_scale`` is the intensity mapped to the top code; None means
    auto-scale (the maximum noiseless intensity of the rendered set).
    ``noise_sigma`` is the noise std in intensity units; 0 disables noise.
    """

    bit_depth: int = 12
    full_scale: float | None = None
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 8 <= self.bit_depth <= 16:
            raise ValueError(f"bit_depth={self.bit_depth}: must be in [8, 16]")
        if self.full_scale is not None and not self.full_scale > 0:
            raise ValueError(f"full_scale={self.full_scale}: must be positive")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma={self.noise_sigma}: must be >= 0")

    @property
    def max_code(self) -> int:
        return (1 << self.bit_depth) - 1


@dataclass(frozen=True)
class CameraFrame:
    """Quantized intensity image plus the scale needed to undo quantization."""

    grid: Grid2D
    codes: np.ndarray
    bit_depth: int
    full_scale: float

    def __post_init__(self) -> None:
        codes = np.array(self.codes, dtype=np.uint16, copy=True)
        if codes.shape != self.grid.shape:
            raise ValueError(f"codes shape {codes.shape} != grid {self.grid.shape}")
        if codes.max(initial=0) > (1 << self.bit_depth) - 1:
            raise ValueError("codes exceed the camera bit depth")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    def intensity(self) -> np.ndarray:
        """Back to intensity units: codes * full_scale / max_code."""
        max_code = (1 << self.bit_depth) - 1
        return self.codes.astype(np.float64) * (self.full_scale / max_code)


@dataclass(frozen=True)
class SpatialScheme:
    """One tilted reference; Wollaston splits X to the left half, Y right."""

    carrier: SpatialFrequency
    phase0: float = 0.0
    ref_amplitude: float | None = None

    variant = "spatial"


@dataclass(frozen=True)
class AngularScheme:
    """Two polarized references at distinct tilts on the full frame."""

    ref_x: ReferenceBeam
    ref_y: ReferenceBeam
    ref_amplitude: float | None = None
    min_carrier_separation_bins: float = 8.0

    variant = "angular"


Scheme = SpatialScheme | AngularScheme


def default_spatial_scheme(grid: Grid2D, ref_amplitude: float | None = None) -> SpatialScheme:
    """Reference tilt of one fringe per 8 pixels in each axis."""
    return SpatialScheme(
        carrier=SpatialFrequency(1.0 / (8.0 * grid.pitch_x), 1.0 / (8.0 * grid.pitch_y)),
        ref_amplitude=ref_amplitude,
    )


def default_angular_scheme(grid: Grid2D, ref_amplitude: float | None = None) -> AngularScheme:
    """X and Y references mirrored in fx so the two sidebands and DC separate."""
    fx = 1.0 / (8.0 * grid.pitch_x)
    fy = 1.0 / (8.0 * grid.pitch_y)
    return AngularScheme(
        ref_x=ReferenceBeam((1.0, 0.0), SpatialFrequency(fx, fy)),
        ref_y=ReferenceBeam((0.0, 1.0), SpatialFrequency(-fx, fy)),
        ref_amplitude=ref_amplitude,
    )


def validate_scheme(scheme: Scheme, camera_grid: Grid2D) -> None:
    """Grid-dependent scheme invariants, shared by synthesis and recon."""
    if isinstance(scheme, SpatialScheme):
        camera_grid.left_half()  # raises when the halves would be invalid grids
        if not scheme.carrier.below_nyquist(camera_grid.left_half()):
            raise ConfigError("spatial reference carrier at or above Nyquist")
    elif isinstance(scheme, AngularScheme):
        for ref in (scheme.ref_x, scheme.ref_y):
            if not ref.carrier.below_nyquist(camera_grid):
                raise ConfigError("angular reference carrier at or above Nyquist")
        dx = (scheme.ref_x.carrier.fx - scheme.ref_y.carrier.fx) / camera_grid.df_x
        dy = (scheme.ref_x.carrier.fy - scheme.ref_y.carrier.fy) / camera_grid.df_y
        sep = float(np.hypot(dx, dy))
        if sep < scheme.min_carrier_separation_bins:
            raise ConfigError(
                f"reference carriers {sep:.2f} bins apart, below the minimum "
                f"{scheme.min_carrier_separation_bins}"
            )
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class DeviceModel:
    """Ground-truth transfer matrix of the device under test.

    ``truth_matrix`` has shape (2M, 2P): rows are (mode, output pol) with the
    X block first, columns are (port, input pol), port-major with X before Y.
    """

    truth_matrix: np.ndarray
    basis: ModeBasis

    def __post_init__(self) -> None:
        t = np.array(self.truth_matrix, dtype=np.complex128, copy=True)
        m = len(self.basis)
        if t.ndim != 2 or t.shape[0] != 2 * m:
            raise ValueError(f"truth matrix shape {t.shape}: expected 2*{m} rows")
        if t.shape[1] % 2 != 0 or t.shape[1] < 2:
            raise ValueError(f"truth matrix shape {t.shape}: need 2 columns per port")
        if not np.all(np.isfinite(t.view(np.float64))):
            raise ValueError("truth matrix contains non-finite entries")
        t.setflags(write=False)
        object.__setattr__(self, "truth_matrix", t)

    @property
    def port_count(self) -> int:
        return self.truth_matrix.shape[1] // 2

    def column(self, port: int, in_pol: str) -> np.ndarray:
        if not 0 <= port < self.port_count:
            raise IndexError(f"port {port} out of range [0, {self.port_count})")
        return self.truth_matrix[:, 2 * port + _check_pol(in_pol)]


def synth_output_field(device: DeviceModel, port: int, in_pol: str) -> JonesField:
    """Device output Jones field for one (port, input polarization) excitation."""
    col = device.column(port, in_pol)
    m = len(device.basis)
    grid = device.basis.grid
    sx = np.zeros(grid.shape, dtype=np.complex128)
    sy = np.zeros(grid.shape, dtype=np.complex128)
    for k, mode in enumerate(device.basis.modes):
        sx += col[k] * mode.samples
        sy += col[m + k] * mode.samples
    return JonesField(ComplexField(grid, sx), ComplexField(grid, sy))


def _signal_rms(signal: JonesField) -> float:
    mean_sq = np.mean(np.abs(signal.x.samples) ** 2 + np.abs(signal.y.samples) ** 2)
    return float(np.sqrt(mean_sq))


def resolve_ref_amplitude(signal: JonesField, scheme: Scheme) -> float:
    """Explicit scheme amplitude, or the frame's RMS signal amplitude."""
    if scheme.ref_amplitude is not None:
        return float(scheme.ref_amplitude)
    return _signal_rms(signal)


def render_intensity(signal: JonesField, scheme: Scheme, camera_grid: Grid2D) -> tuple[np.ndarray, float]:
    """Noiseless physical intensity on the camera, plus the reference amplitude used.

    Spatial scheme: the signal lives on the half-region grid and each half of
    the returned frame is an independent single-polarization interference.
    Angular scheme: the signal lives on the full camera grid.
    """
    validate_scheme(scheme, camera_grid)
    amp = resolve_ref_amplitude(signal, scheme)

    if isinstance(scheme, SpatialScheme):
        half = camera_grid.left_half()
        if signal.grid != half:
            raise GridMismatch(
                f"spatial-scheme signal must live on the half-region grid "
                f"({half.nx}x{half.ny}), got {signal.grid.nx}x{signal.grid.ny}"
            )
        ref = amp * plane_wave(half, 1.0, scheme.carrier, scheme.phase0).samples
        left = np.abs(signal.x.samples + ref) ** 2
        right = np.abs(signal.y.samples + ref) ** 2
        return np.concatenate([left, right], axis=1), amp

    if signal.grid != camera_grid:
        raise GridMismatch("angular-scheme signal must live on the camera grid")
    pw_x = plane_wave(camera_grid, 1.0, scheme.ref_x.carrier, scheme.ref_x.phase0).samples
    pw_y = plane_wave(camera_grid, 1.0, scheme.ref_y.carrier, scheme.ref_y.phase0).samples
    jx = scheme.ref_x.unit_jones()
    jy = scheme.ref_y.unit_jones()
    ex = signal.x.samples + amp * (jx[0] * pw_x + jy[0] * pw_y)
    ey = signal.y.samples + amp * (jx[1] * pw_x + jy[1] * pw_y)
    return np.abs(ex) ** 2 + np.abs(ey) ** 2, amp


def _quantize(
    intensity: np.ndarray,
    grid: Grid2D,
    camera: CameraModel,
    full_scale: float,
    rng: np.random.Generator,
) -> CameraFrame:
    if camera.noise_sigma > 0:
        intensity = intensity + rng.normal(0.0, camera.noise_sigma, intensity.shape)
    raw = np.round(intensity / full_scale * camera.max_code)
    clipped = np.count_nonzero(raw > camera.max_code)
    if clipped > 0.01 * raw.size:
        warnings.warn(
            f"{clipped / raw.size:.1%} of pixels clipped at full scale",
            SaturationWarning,
            stacklevel=3,
        )
    codes = np.clip(raw, 0, camera.max_code).astype(np.uint16)
    return CameraFrame(grid, codes, camera.bit_depth, full_scale)


def render_frame(
    signal: JonesField,
    scheme: Scheme,
    camera: CameraModel,
    camera_grid: Grid2D,
    frame_index: int = 0,
) -> CameraFrame:
    """One noisy, quantized camera frame; deterministic given the camera seed.

    With ``camera.full_scale`` unset, the frame auto-scales to its own peak;
    multi-frame runs should use simulate_measurement, which shares one scale.
    """
    intensity, _ = render_intensity(signal, scheme, camera_grid)
    fs = camera.full_scale if camera.full_scale is not None else max(float(intensity.max()), 1.0)
    rng = np.random.default_rng(camera.rng_seed ^ frame_index)
    return _quantize(intensity, camera_grid, camera, fs, rng)


@dataclass(frozen=True)
class SimulatedMeasurement:
    """All frames of one acquisition run, port-major, X before Y."""

    frames: tuple[CameraFrame, ...]
    excitations: tuple[tuple[int, str], ...]
    ref_amplitudes: tuple[float, ...]
    full_scale: float


def simulate_measurement(
    device: DeviceModel,
    scheme: Scheme,
    camera: CameraModel,
    camera_grid: Grid2D,
) -> SimulatedMeasurement:
    """Render frames for every (port, input pol), sharing one full-scale value.

    Frames are ordered port-major with X before Y. Noise is drawn per frame
    from seed ``rng_seed ^ frame_index`` so parallel and serial runs agree.
    """
    excitations = [(p, q) for p in range(device.port_count) for q in POLS]
    intensities = []
    amplitudes = []
    for port, pol in excitations:
        signal = synth_output_field(device, port, pol)
        intensity, amp = render_intensity(signal, scheme, camera_grid)
        intensities.append(intensity)
        amplitudes.append(amp)

    if camera.full_scale is not None:
        fs = camera.full_scale
    else:
        fs = max(max(float(i.max()) for i in intensities), 1.0)

    frames = []
    for idx, intensity in enumerate(intensities):
        rng = np.random.default_rng(camera.rng_seed ^ idx)
        frames.append(_quantize(intensity, camera_grid, camera, fs, rng))
    return SimulatedMeasurement(
        tuple(frames), tuple(excitations), tuple(amplitudes), fs
    )


def _haar_unitary_2x2(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _rescale_singular_values(t: np.ndarray, mdl_target_db: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(t)
    ratio = s[0] / s[-1]
    target = 10.0 ** (mdl_target_db / 20.0)
    if ratio <= 1.0 + 1e-12:
        s_new = np.linspace(target, 1.0, s.size) * s.mean()
    else:
        exponent = np.log(target) / np.log(ratio)
        s_new = s[-1] * (s / s[-1]) ** exponent
    return (u * s_new) @ vh


def _build_lantern(
    rng: np.random.Generator,
    ports: int,
    n_modes: int,
    xt_lin: float,
    mdl_db: float,
    group_map,
) -> np.ndarray:
    m, p = n_modes, ports
    t = np.zeros((2 * m, 2 * p), dtype=np.complex128)
    gains = 10.0 ** (-np.linspace(0.0, mdl_db, 2 * p) / 20.0)
    rng.shuffle(gains)
    for port in range(p):
        group = group_map.groups[port]
        partners = [mm for mm in group_map.members(group) if mm != port]
        off_modes = [mm for mm in range(m) if group_map.groups[mm] != group]
        upol = _haar_unitary_2x2(rng)
        for qi in range(2):
            col = np.zeros(2 * m, dtype=np.complex128)
            col[port] = upol[0, qi]
            col[m + port] = upol[1, qi]
            # degenerate-partner mixing stays inside the target group (~-10 dB)
            for mm in partners:
                mix = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                mix *= 10.0 ** (rng.uniform(-12.0, -8.0) / 20.0) / np.linalg.norm(mix)
                col[mm] += mix[0]
                col[m + mm] += mix[1]
            in_rows = [mm for mm in group_map.members(group)] + [
                m + mm for mm in group_map.members(group)
            ]
            col[in_rows] /= np.linalg.norm(col[in_rows])
            off_rows = off_modes + [m + mm for mm in off_modes]
            noise = rng.standard_normal(len(off_rows)) + 1j * rng.standard_normal(len(off_rows))
            jitter = 10.0 ** (rng.uniform(-0.4, 0.4) / 10.0)
            col[off_rows] = noise * (np.sqrt(xt_lin * jitter) / np.linalg.norm(noise))
            t[:, 2 * port + qi] = gains[2 * port + qi] * col / np.linalg.norm(col)
    return _rescale_singular_values(t, mdl_db)


def random_lantern_matrix(
    ports: int = 3,
    n_modes: int = 3,
    mdl_db: float = 1.5,
    xt_db: float = -14.0,
    seed: int = 0,
) -> np.ndarray:
    """Random ground-truth matrix with exact MDL and crosstalk near the request.

    Port p couples mainly into mode p (through a random polarization unitary
    plus mixing into its degenerate group partner); off-group entries set the
    crosstalk. A singular-value rescale pins the MDL exactly, and a short
    fixed-point loop compensates its effect on crosstalk. Deterministic given
    the seed; the default LP group map (ports 1 and 2 share a group) is used.
    """
    from .analysis import PowerMatrix, TransferMatrix, crosstalk_db, power_condense
    from .modes import ModeGroupMap

    if ports != n_modes:
        raise ValueError("the port-to-mode construction needs ports == n_modes")
    group_map = ModeGroupMap.lp_default(n_modes) if n_modes == 3 else ModeGroupMap.per_mode(n_modes)
    labels = tuple(f"mode{k}" for k in range(n_modes))

    def measured_xt(t: np.ndarray) -> float:
        tm = TransferMatrix(t, labels, ports)
        return crosstalk_db(power_condense(tm), group_map)["xt_db"]

    request = xt_db
    t = _build_lantern(np.random.default_rng([seed, 0]), ports, n_modes, 10 ** (request / 10), mdl_db, group_map)
    for _ in range(10):
        err = measured_xt(t) - xt_db
        if abs(err) < 0.02:
            break
        request -= err
        t = _build_lantern(
            np.random.default_rng([seed, 0]), ports, n_modes, 10 ** (request / 10), mdl_db, group_map
        )
    return t

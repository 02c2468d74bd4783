from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

CSV_COLUMNS: tuple[str, ...] = (
    "t",
    "x",
    "y",
    "z",
    "phi",
    "theta",
    "psi",
    "u",
    "v",
    "w",
    "p",
    "q",
    "r",
    "s1",
    "s2",
    "e_phi",
    "e_theta",
    "e_psi_2pi",
    "e_theta_a",
    "e_psi_a",
    "u_c",
    "p_c",
    "q_c",
    "r_c",
    "tau_u",
    "tau_p",
    "tau_q",
    "tau_r",
    "d_norm",
    "dhat_norm",
    "eps_norm",
    "epshat_norm",
    "eps_psi",
    "eps_theta",
)

# 名称 -> 每个采样点的维度
SERIES_SHAPES: dict[str, int] = {
    "eta": 6,
    "nu": 6,
    "eta_c": 6,
    "nu_c": 6,
    "nu_c_raw": 6,
    "tau": 6,
    "gamma_tau": 6,
    "tau_eta": 6,
    "x_hat": 18,
    "e": 5,
    "e_2pi": 5,
    "e_a": 2,
    "d": 6,
    "d_hat": 6,
    "eps": 6,
    "eps_hat": 6,
    "eps_psi": 1,
    "eps_theta": 1,
    "f_eps_psi": 1,
    "f_eps_theta": 1,
    "nu_dot": 6,
    "h_p": 3,
    # (θ_a, ψ_a)，ψ_a 不取模
    "aux_orientation": 2,
    "tangent": 3,
    # ϑ₁ 与 ϑ₂ 拼接
    "normals": 6,
    # 1 表示该步外环使用了 ε̂
    "compensated": 1,
}


@dataclass
class SimulationTrace:
    """所有序列共用同一时间轴 t；出现故障时只保留故障前的样本"""

    scenario_id: str
    t: np.ndarray
    series: dict[str, np.ndarray]
    fault: dict[str, Any] | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def allocate(cls, scenario_id: str, capacity: int) -> SimulationTrace:
        series = {
            name: np.zeros(capacity) if width == 1 else np.zeros((capacity, width))
            for name, width in SERIES_SHAPES.items()
        }
        return cls(scenario_id=scenario_id, t=np.zeros(capacity), series=series)

    def truncate(self, n: int) -> None:
        self.t = self.t[:n]
        self.series = {name: values[:n] for name, values in self.series.items()}

    def __getitem__(self, name: str) -> np.ndarray:
        if name == "t":
            return self.t
        return self.series[name]

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def completed(self) -> bool:
        return self.fault is None

    def e_p_norm(self) -> np.ndarray:
        return np.linalg.norm(self.series["e"][:, :2], axis=1)

    def e_2pi_norm(self) -> np.ndarray:
        return np.linalg.norm(self.series["e_2pi"], axis=1)

    def to_rows(self, decimation: int = 1) -> Iterator[list[float]]:
        """按 CSV_COLUMNS 的顺序输出行"""
        step = max(1, int(decimation))
        s = self.series
        d_norm = np.linalg.norm(s["d"], axis=1)
        dhat_norm = np.linalg.norm(s["d_hat"], axis=1)
        eps_norm = np.linalg.norm(s["eps"], axis=1)
        epshat_norm = np.linalg.norm(s["eps_hat"], axis=1)
        for k in range(0, len(self), step):
            eta = s["eta"][k]
            nu = s["nu"][k]
            e = s["e"][k]
            e_2pi = s["e_2pi"][k]
            e_a = s["e_a"][k]
            nu_c = s["nu_c"][k]
            tau = s["tau"][k]
            yield [
                float(self.t[k]),
                *(float(v) for v in eta),
                *(float(v) for v in nu),
                float(e[0]),
                float(e[1]),
                float(e_2pi[2]),
                float(e_2pi[3]),
                float(e_2pi[4]),
                float(e_a[0]),
                float(e_a[1]),
                float(nu_c[0]),
                float(nu_c[3]),
                float(nu_c[4]),
                float(nu_c[5]),
                float(tau[0]),
                float(tau[3]),
                float(tau[4]),
                float(tau[5]),
                float(d_norm[k]),
                float(dhat_norm[k]),
                float(eps_norm[k]),
                float(epshat_norm[k]),
                float(s["eps_psi"][k]),
                float(s["eps_theta"][k]),
            ]

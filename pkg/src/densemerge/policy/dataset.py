"""Training data from closed-loop rule-policy rollouts.

Each scene runs the rule policy for the main-lane vehicles while a scripted
vehicle creeps along the merge lane to exert interaction pressure. The rollout
is sliced into 50-frame windows (10 in, 40 out) per main-lane vehicle; a
window is kept only if, at its anchor frame, the target has a same-lane
leader within a 10 m gap, both travel between 1 and 5 m/s, and at least one
adjacent-lane vehicle sits within 5 m along the lane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import (
    DT,
    D_V,
    Lane,
    MAX_NEIGHBORS,
    T_FUT,
    T_HIS,
    make_vehicle,
)
from ..core.sample import (
    CH_LENGTH,
    CH_THETA,
    CH_VX,
    CH_VY,
    CH_X,
    CH_Y,
    Sample,
    assemble_sample_indexed,
    compute_channel_frame,
    road_projector,
)
from ..scenario import DensityClass, GenParams, Scenario, sample_scenario
from .idm import IdmParams, STYLE_PARAMS, idm_accel
from .rule import plan_rule_batch
from .trajectory import PlannedTrajectory

LEAD_FILTER_GAP = 10.0
SPEED_FILTER = (1.0, 5.0)
ADJACENT_FILTER_RANGE = 5.0

_CREEP_PARAMS = IdmParams(v0=2.8, T=1.0, s0=2.0, a_max=1.5, b=2.0)
_N_TOKENS = 1 + MAX_NEIGHBORS


@dataclass(frozen=True)
class TrainingExample:
    """Sample plus ground-truth futures in the sample's frame."""

    sample: Sample
    target_future: np.ndarray   # (T_FUT, 4): x, y, theta, speed
    aux_future: np.ndarray      # (1 + MAX_NEIGHBORS, T_FUT, 4); row 0 is the target
    aux_mask: np.ndarray        # (1 + MAX_NEIGHBORS,) bool


def rollout_scene(scenario: Scenario, n_ticks: int, seed: int = 0,
                  with_noise: bool = True) -> list[list]:
    """Advance a scene for n_ticks; returns per-tick state lists.

    Vehicle order per tick: main vehicles in scenario order, then the
    merge-lane creeper derived from the scenario ego.
    """
    from ..core.sample import SceneHistory

    road = scenario.road
    mains = list(scenario.main_vehicles)
    ego = scenario.ego
    n_main = len(mains)
    rngs = None
    if with_noise:
        rngs = [np.random.default_rng(np.random.SeedSequence((scenario.seed, seed, i)))
                for i in range(n_main)]
    params = [STYLE_PARAMS[v.label] for v in mains]

    states = mains + [ego]
    frames = [list(states)]
    hist = SceneHistory(road, states)
    bounds = road.lateral_bounds
    from ..core import apply_trajectory_step

    for _ in range(n_ticks - 1):
        samples = [hist.sample_for(i) for i in range(n_main)]
        plans = plan_rule_batch(samples, params, rngs)
        new_mains = []
        for i, plan in enumerate(plans):
            nxt = plan.to_global(samples[i].frame).first
            nxt = nxt._replace(y=min(max(nxt.y, bounds[0]), bounds[1]))
            new_mains.append(apply_trajectory_step(mains[i], nxt))
        mains = new_mains

        # scripted merge-lane creeper: IDM toward a stop point before the lane end
        v = ego.speed
        stop_gap = (road.merge_end_x - 3.0) - ego.x - ego.length / 2
        a = idm_accel(v, 0.0, max(stop_gap, 0.01), _CREEP_PARAMS)
        x = ego.x + v * DT
        v_new = max(0.0, v + a * DT)
        ego = make_vehicle(x, float(road.centerline_y(Lane.MERGE, x)), speed=v_new,
                           label=ego.label, lane=Lane.MERGE, ax=(v_new - v) / DT)

        states = mains + [ego]
        frames.append(list(states))
        hist.push(states)
    return frames


def _find_leader(s: np.ndarray, lane_codes: np.ndarray, lengths: np.ndarray,
                 idx: int) -> tuple[int, float] | None:
    """(leader index, bumper gap) on the target's own lane, or None."""
    best = None
    for j in range(len(s)):
        if j == idx or lane_codes[j] != lane_codes[idx] or s[j] <= s[idx]:
            continue
        gap = (s[j] - s[idx]) - (lengths[j] + lengths[idx]) / 2
        if best is None or gap < best[1]:
            best = (j, gap)
    return best


def window_passes_filters(ch: np.ndarray, lane_codes: np.ndarray, s: np.ndarray,
                          idx: int) -> bool:
    """Data filters evaluated at one anchor frame for one target."""
    speed = math.hypot(ch[idx, CH_VX], ch[idx, CH_VY])
    if not SPEED_FILTER[0] <= speed <= SPEED_FILTER[1]:
        return False
    leader = _find_leader(s, lane_codes, ch[:, CH_LENGTH], idx)
    if leader is None or leader[1] > LEAD_FILTER_GAP:
        return False
    lspeed = math.hypot(ch[leader[0], CH_VX], ch[leader[0], CH_VY])
    if not SPEED_FILTER[0] <= lspeed <= SPEED_FILTER[1]:
        return False
    adjacent = (lane_codes != lane_codes[idx]) & (np.abs(s - s[idx]) <= ADJACENT_FILTER_RANGE)
    return bool(adjacent.any())


def _future_track(stack: np.ndarray, j: int, frame) -> np.ndarray:
    """(T_FUT, 4) future of scene vehicle j expressed in the sample frame."""
    c, sn = math.cos(-frame.origin_theta), math.sin(-frame.origin_theta)
    rot = np.array([[c, -sn], [sn, c]])
    xy = (stack[:, j, (CH_X, CH_Y)] - (frame.origin_x, frame.origin_y)) @ rot.T
    theta = stack[:, j, CH_THETA] - frame.origin_theta
    speed = np.hypot(stack[:, j, CH_VX], stack[:, j, CH_VY])
    return np.column_stack([xy, theta, speed])


def slice_windows(frames: list[list], road, stride: int = 1,
                  targets: list[int] | None = None) -> tuple[list[TrainingExample], int]:
    """Cut filtered training windows out of a rollout.

    Returns (examples, number of windows considered). Targets defaults to the
    main-lane vehicles of the rollout.
    """
    proj = road_projector(road)
    per_tick = []
    prev = None
    for f in frames:
        ch, lanes, s = compute_channel_frame(f, proj, prev)
        per_tick.append((ch, lanes, s))
        prev = ch
    channels = np.stack([p[0] for p in per_tick])
    lane_codes = per_tick[0][1]
    if targets is None:
        targets = [i for i in range(len(frames[0])) if frames[0][i].lane is Lane.MAIN]

    examples: list[TrainingExample] = []
    considered = 0
    for anchor in range(T_HIS - 1, len(frames) - T_FUT, stride):
        ch, lanes, s = per_tick[anchor]
        for idx in targets:
            considered += 1
            if not window_passes_filters(ch, lanes, s, idx):
                continue
            window = channels[anchor - T_HIS + 1:anchor + 1]
            sample, chosen = assemble_sample_indexed(window, lanes, s, idx, proj)
            fut_stack = channels[anchor + 1:anchor + 1 + T_FUT]
            aux_future = np.zeros((_N_TOKENS, T_FUT, 4))
            aux_mask = np.zeros(_N_TOKENS, dtype=bool)
            target_future = _future_track(fut_stack, idx, sample.frame)
            aux_future[0] = target_future
            aux_mask[0] = True
            for slot, j in enumerate(chosen):
                aux_future[1 + slot] = _future_track(fut_stack, j, sample.frame)
                aux_mask[1 + slot] = True
            examples.append(TrainingExample(sample=sample, target_future=target_future,
                                            aux_future=aux_future, aux_mask=aux_mask))
    return examples, considered


def generate_dataset(n_scenes: int, rng=0, n_ticks: int = 100, stride: int = 1,
                     gen_params: GenParams | None = None,
                     max_examples: int | None = None):
    """Roll scenes and harvest filtered windows.

    Returns (examples, report); the report carries scene seeds and the
    considered/kept window counts. May return fewer examples than hoped when
    the filters reject aggressively.
    """
    if n_scenes < 1:
        raise ValueError("n_scenes must be at least 1")
    rng = np.random.default_rng(rng)
    densities = list(DensityClass)
    examples: list[TrainingExample] = []
    seeds = []
    considered = 0
    for k in range(n_scenes):
        seed = int(rng.integers(0, 2 ** 31))
        seeds.append(seed)
        scenario = sample_scenario(seed, densities[k % 3], gen_params)
        frames = rollout_scene(scenario, n_ticks, seed=seed)
        got, cons = slice_windows(frames, scenario.road, stride=stride)
        considered += cons
        examples.extend(got)
        if max_examples is not None and len(examples) >= max_examples:
            examples = examples[:max_examples]
            break
    report = {"scenes": len(seeds), "scene_seeds": seeds,
              "windows_considered": considered, "kept": len(examples)}
    return examples, report

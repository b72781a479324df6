#!/usr/bin/env python3
"""
Banco de experimentos por línea de comandos
Evalúa asignaciones, corre el oráculo Monte Carlo, los solvers GA / PSO,
barridos de parámetros y curvas de confiabilidad en el tiempo
"""

import argparse
import logging
import os
import shlex
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

# Agregar el directorio src al path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from analysis.interval_core import ComparisonPolicy, Interval  # noqa: E402
from analysis.mc_oracle import agreement, simulate  # noqa: E402
from analysis.oss_reliability import (  # noqa: E402
    ErlangParams,
    OssConfig,
    mttf,
    time_dependent_system_reliability,
)
from analysis.report_generator import ExperimentReportGenerator, RunManifest  # noqa: E402
from config.reference_data import (  # noqa: E402
    INSTANCE_PRESETS,
    INTERVAL_SET_TYPES,
    LOGICAL_ELEMENTS,
    get_published_allocation,
)
from data_sources.instance_loader import (  # noqa: E402
    load_allocation,
    load_instance,
    load_params,
    parse_interval,
    resolve_interval_set,
)
from optimization import ga_solver, pso_solver  # noqa: E402
from optimization.rap_problem import (  # noqa: E402
    Allocation,
    Objective,
    RapInstance,
    SolverReport,
    check_cost,
    evaluate,
    fitness_better,
    repair,
)
from utils import __version__  # noqa: E402
from utils.config import get_config  # noqa: E402
from utils.errors import InputError, InvalidSweepSpec, NegativeTime, RapToolkitError  # noqa: E402
from utils.seeding import RNG_ALGORITHM, derive_seed  # noqa: E402

logger = logging.getLogger(__name__)


class SweepSpec(BaseModel):
    """Barrido de sensibilidad de un parámetro del GA"""

    model_config = ConfigDict(extra="forbid")

    parameter: Literal["m_gen", "p_size", "p_cross", "p_mutat"]
    values: List[float] = Field(..., min_length=1)
    repetitions: int = Field(1, ge=1)
    base: Dict = Field(default_factory=dict)

    def value_for(self, value: float):
        return int(value) if self.parameter in ("m_gen", "p_size") else float(value)


def _preset_for(inst: RapInstance) -> str:
    return inst.name if inst.name in INSTANCE_PRESETS else "example_one"


def _load_context(args) -> Tuple[RapInstance, Optional[str]]:
    """Instancia con el conjunto de intervalos elegido"""
    set_name, r_set = None, None
    if args.set:
        set_name, r_set = resolve_interval_set(args.set)
    inst = load_instance(args.instance, r_set=r_set, cost_mode=args.cost_mode, objective=args.objective)
    return inst, set_name


def _mission_interval(args, inst: RapInstance) -> Interval:
    if args.interval:
        return parse_interval(args.interval)
    return inst.decision_r


def _output_dir(args, command: str, label: str) -> Path:
    if args.out:
        return Path(args.out)
    return get_config().get_output_dir() / f"{command}_{label}"


def _manifest(argv: Sequence[str], args, params: Dict, seed: Optional[int], started: float, **extra) -> RunManifest:
    return RunManifest(command=" ".join(shlex.quote(token) for token in ["bench_cli", *argv]),
                       instance=getattr(args, 'instance', None), params=params, seed=seed,
                       version=__version__, rng_algorithm=RNG_ALGORITHM,
                       wall_time=round(time.perf_counter() - started, 4), extra=extra)


def _default_allocation(args, inst: RapInstance, set_name: Optional[str], r_point: float) -> Allocation:
    if args.allocation:
        return load_allocation(args.allocation, inst, r_point)
    published = get_published_allocation(inst.name, set_name or "SET1")
    if published:
        path = get_config().get_data_dir() / "allocations" / published['file']
        return load_allocation(path, inst, r_point)
    ones = np.ones((inst.m, inst.n), dtype=np.uint8)
    logger.warning("⚠️  Sin asignación indicada: se usa la asignación completa reparada")
    return repair(inst, Allocation(ones, ones), None, r_point)


def cmd_eval(args, argv: Sequence[str]) -> int:
    """Evalúa una asignación: confiabilidad inferior/superior, costo y factibilidad"""
    started = time.perf_counter()
    inst, set_name = _load_context(args)
    r = _mission_interval(args, inst)
    alloc = _default_allocation(args, inst, set_name, r.center)
    fitness = evaluate(inst, alloc, r)
    cost = check_cost(inst, alloc)

    print(f"Instancia: {inst.name}  conjunto: {set_name} ({INTERVAL_SET_TYPES.get(set_name, '-')})  r = {r}")
    print(f"Asignación: {alloc.format_published()}")
    print(f"Confiabilidad (inferior/superior): {fitness.value.lo:.6f} / {fitness.value.hi:.6f}")
    print(f"Costo ({inst.cost_mode.value}): {fitness.cost}  total: {cost.total}  presupuesto: {inst.budget}")
    print(f"Factible: {'Sí' if fitness.feasible else 'No'}")

    published = get_published_allocation(inst.name, set_name or "SET1") if not args.allocation else {}
    extra = {'set': set_name, 'r': r.to_list(), 'reliability': fitness.value.to_list(),
             'cost': fitness.cost, 'total_cost': cost.total, 'feasible': fitness.feasible}
    if published:
        lo, hi = published['reliability']
        full = evaluate(inst, alloc, r, Objective.FULL)
        extra['published'] = {'reliability': [lo, hi], 'cost': published['cost']}
        extra['deviation'] = {'lo': fitness.value.lo - lo, 'hi': fitness.value.hi - hi,
                              'cost': fitness.cost - published['cost']}
        extra['full_enumeration'] = {'reliability': full.value.to_list(),
                                     'deviation': {'lo': full.value.lo - lo, 'hi': full.value.hi - hi}}
        print(f"Enumeración completa (inferior/superior): {full.value.lo:.6f} / {full.value.hi:.6f}")
        print(f"Publicado: {lo:.6f} / {hi:.6f}, costo {published['cost']} "
              f"(desviación superior {extra['deviation']['hi']:+.6f}, "
              f"enumeración completa {extra['full_enumeration']['deviation']['hi']:+.6f})")

    if args.out:
        reporter = ExperimentReportGenerator(Path(args.out))
        reporter.write_text(alloc.format_published(), "allocation.txt")
        reporter.write_manifest(_manifest(argv, args, {}, None, started, **extra))
    return 0


def cmd_mc(args, argv: Sequence[str]) -> int:
    """Estimación Monte Carlo contra la forma cerrada"""
    started = time.perf_counter()
    config = get_config()
    oracle = config.get_oracle_config()
    inst, set_name = _load_context(args)
    r = _mission_interval(args, inst)
    r_point = {'lo': r.lo, 'hi': r.hi, 'center': r.center}[args.endpoint]
    alloc = _default_allocation(args, inst, set_name, r.center)
    cfg = inst.config_for(alloc, Interval.point(r_point))
    seed = args.seed if args.seed is not None else config.get_default_seed()
    trials = args.trials or oracle['trials']

    estimate = simulate(cfg, r_point, trials, seed, partition_size=oracle['partition_size'],
                        workers=oracle['workers'])
    verdict = agreement(cfg, estimate, r_point, sigmas=oracle['agree_sigmas'], floor=oracle['agree_floor'])

    print(f"Ensayos: {estimate.trials}  semilla: {seed}  r = {r_point:.6f}")
    print(f"Media: {estimate.mean:.6f}  error estándar: {estimate.stderr:.6f}")
    print(f"Forma cerrada: {verdict['closed_form']:.6f}  |Δ| = {verdict['delta']:.6f}  "
          f"tolerancia: {verdict['tolerance']:.6f}")
    print(verdict['verdict'])

    if args.out:
        reporter = ExperimentReportGenerator(Path(args.out))
        reporter.write_manifest(_manifest(argv, args, oracle, seed, started,
                                          estimate=estimate.to_dict(), agreement=verdict))
    return 0


def build_solver_params(args, inst: RapInstance):
    """Defaults del modelo < preset YAML < archivo de parámetros < flags"""
    config = get_config()
    preset = _preset_for(inst)
    overrides: Dict = {}
    if args.solver == "ga":
        values = dict(config.get_ga_defaults(preset))
        values.update(load_params(args.params))
        if args.no_primary_phase:
            overrides['primary_phase'] = False
        model = ga_solver.GaParams
    else:
        values = dict(config.get_pso_defaults(preset))
        values.update(load_params(args.params))
        if args.variant:
            overrides['variant'] = args.variant
        if args.subtraction:
            overrides['subtraction'] = args.subtraction
        if args.no_local_search:
            overrides['local_search'] = False
        if args.search_mode:
            overrides['search_mode'] = args.search_mode
        model = pso_solver.PsoParams
    if args.runs:
        overrides['runs'] = args.runs
    if args.trials:
        overrides['trials'] = args.trials
    values.update(overrides)
    values['seed'] = args.seed if args.seed is not None else config.get_default_seed()
    try:
        return model(**values)
    except ValidationError as exc:
        raise InputError(f"Parámetros inválidos: {exc}")


def _run_solver(inst: RapInstance, params, r: Optional[Interval]) -> SolverReport:
    if isinstance(params, ga_solver.GaParams):
        return ga_solver.run(inst, params, r)
    return pso_solver.run(inst, params, r)


def run_repeated(inst: RapInstance, params, r: Optional[Interval] = None,
                 workers: int = 1) -> List[Tuple[int, int, SolverReport]]:
    """
    trials × runs corridas independientes con semillas derivadas

    La corrida global k = trial·runs + run usa derive_seed(seed, k).

    Returns:
        Lista ordenada de (trial, run, SolverReport)
    """
    jobs = []
    for trial in range(params.trials):
        for run in range(params.runs):
            index = trial * params.runs + run
            jobs.append((trial, run, params.model_copy(update={'seed': derive_seed(params.seed, index)})))

    def execute(job):
        trial, run, run_params = job
        return trial, run, _run_solver(inst, run_params, r)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(execute, jobs))
    return [execute(job) for job in jobs]


def best_of(reports: Sequence[SolverReport]) -> SolverReport:
    """Mejor reporte (orden de corrida en empates)"""
    best = reports[0]
    for report in reports[1:]:
        if fitness_better(report.fitness, best.fitness, ComparisonPolicy.COMBINED):
            best = report
    return best


def cmd_solve(args, argv: Sequence[str]) -> int:
    """Corre GA o PSO, escribe trazas, asignación, gráficos y manifiesto"""
    started = time.perf_counter()
    inst, set_name = _load_context(args)
    params = build_solver_params(args, inst)
    r = parse_interval(args.interval) if args.interval else None
    results = run_repeated(inst, params, r, get_config().get_run_workers())

    reporter = ExperimentReportGenerator(_output_dir(args, args.solver, f"{inst.name}_{params.seed}"))
    rows = []
    for trial, run, report in results:
        prefix = f"t{trial:02d}_r{run:02d}"
        reporter.write_solver_outputs(report, prefix)
        rows.append({'trial': trial, 'run': run, **report.summary()})
    summary = pd.DataFrame(rows)
    reporter.write_csv(summary, "runs.csv")

    best = best_of([report for _, _, report in results])
    reporter.write_text(best.best.format_published(), "best_allocation.txt")
    if best.archive:
        archive = pd.DataFrame([{'allocation': alloc.format_published(), 'best_lo': fit.value.lo,
                                 'best_hi': fit.value.hi, 'cost': fit.cost} for alloc, fit in best.archive])
        reporter.write_csv(archive, "archive.csv")

    per_trial = summary.groupby('trial')[['best_lo', 'best_hi']].max().reset_index()
    print(f"Solver: {best.solver}  instancia: {inst.name}  conjunto: {set_name}  r = {best.r_used}")
    for _, row in per_trial.iterrows():
        print(f"  Trial {int(row['trial'])}: mejor {row['best_lo']:.6f} / {row['best_hi']:.6f}")
    print(f"Mejor: {best.fitness.value.lo:.6f} / {best.fitness.value.hi:.6f}  costo {best.fitness.cost}  "
          f"factible {'Sí' if best.fitness.feasible else 'No'}")
    print(f"Asignación: {best.best.format_published()}")

    reporter.write_manifest(_manifest(argv, args, params.model_dump(mode="json"), params.seed, started,
                                      set=set_name, best=best.summary()))
    print(f"💾 Salidas en {reporter.output_dir}")
    return 0


def parse_values(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InvalidSweepSpec(f"Lista de valores inválida: '{text}'")


def cmd_sweep(args, argv: Sequence[str]) -> int:
    """Barrido de sensibilidad de un parámetro del GA"""
    started = time.perf_counter()
    inst, set_name = _load_context(args)
    args.solver, args.runs, args.trials = "ga", None, None
    base = build_solver_params(args, inst)
    try:
        spec = SweepSpec(parameter=args.parameter, values=parse_values(args.values),
                         repetitions=args.repetitions, base=base.model_dump(mode="json"))
    except ValidationError as exc:
        raise InvalidSweepSpec(f"Barrido inválido: {exc}")

    rows, traces = [], []
    index = 0
    for value in spec.values:
        for repetition in range(spec.repetitions):
            seed = derive_seed(base.seed, index)
            index += 1
            try:
                params = base.model_copy(update={spec.parameter: spec.value_for(value), 'seed': seed})
                params = ga_solver.GaParams(**params.model_dump())
            except ValidationError as exc:
                raise InvalidSweepSpec(f"{spec.parameter}={value}: {exc}")
            report = ga_solver.run(inst, params)
            rows.append({'parameter': spec.parameter, 'value': value, 'repetition': repetition, 'seed': seed,
                         'best_lo': report.fitness.value.lo, 'best_hi': report.fitness.value.hi,
                         'best_center': report.fitness.center, 'cost': report.fitness.cost})
            trace = report.trace.copy()
            trace.insert(0, 'repetition', repetition)
            trace.insert(0, 'value', value)
            traces.append(trace)
            logger.info(f"✅ {spec.parameter}={value} rep {repetition}: {report.fitness.value}")

    reporter = ExperimentReportGenerator(_output_dir(args, "sweep", f"{inst.name}_{spec.parameter}"))
    summary = pd.DataFrame(rows)
    reporter.write_csv(summary, "sweep.csv")
    reporter.write_csv(pd.concat(traces, ignore_index=True), "sweep_traces.csv")
    reporter.create_sweep_chart(summary, spec.parameter, f"sweep_{spec.parameter}.svg")
    reporter.write_manifest(_manifest(argv, args, spec.model_dump(mode="json"), base.seed, started, set=set_name))
    print(summary.to_string(index=False))
    return 0


def curve_configs(inst: RapInstance, oic_counts: Sequence[int]) -> Dict[int, OssConfig]:
    """
    Una configuración por cantidad de OICs; la OIC i usa la fila i mod m de la instancia,
    con todas las funciones soportadas disponibles y sin arranque previo
    """
    configs = {}
    for count in oic_counts:
        rows = [i % inst.m for i in range(count)]
        a = inst.supported[rows]
        configs[count] = OssConfig(rd=inst.readiness[rows], p=inst.wakeup[rows], a=a, x=np.zeros_like(a))
    return configs


def cmd_curve(args, argv: Sequence[str]) -> int:
    """Confiabilidad del sistema en el tiempo para varias cantidades de OICs"""
    started = time.perf_counter()
    erlang = get_config().get_erlang_config()
    t_start = erlang['t_start'] if args.t_start is None else args.t_start
    t_end = erlang['t_end'] if args.t_end is None else args.t_end
    if t_start < 0 or t_end < 0:
        raise NegativeTime(f"Rango de tiempo negativo: [{t_start}, {t_end}]")
    if t_end < t_start:
        raise InputError(f"t_end={t_end} menor que t_start={t_start}")
    steps = args.t_steps or erlang['t_steps']
    scale = args.element_scale if args.element_scale is not None else erlang['element_scale']
    cores = args.cores or erlang['cores']
    component = args.core_component or erlang['core_component']
    elements = LOGICAL_ELEMENTS[component]
    oic_counts = [int(v) for v in args.oics.split(",")] if args.oics else erlang['oics']

    inst, _ = _load_context(args)
    configs = curve_configs(inst, oic_counts)
    grid = np.linspace(t_start, t_end, steps)
    curve = pd.DataFrame({'t': grid})
    mttf_values = {}
    for count, cfg in configs.items():
        beta = args.beta if args.beta else count + 1
        params = ErlangParams.from_elements([elements] * cores, scale, beta, args.shared_spares)
        curve[f"M={count}"] = [time_dependent_system_reliability(cfg, params, t) for t in grid]
        if args.mttf:
            mttf_values[f"M={count}"] = mttf(cfg, params, erlang['mttf_rel_tol'])
        logger.info(f"✅ Curva M={count} (β={beta}) calculada")

    reporter = ExperimentReportGenerator(_output_dir(args, "curve", inst.name))
    series = [column for column in curve.columns if column != 't']
    reporter.write_csv(curve, "curve.csv")
    reporter.create_curve_chart(curve, series, "curve.svg")
    reporter.write_manifest(_manifest(argv, args, {'element_scale': scale, 'cores': cores, 'oics': oic_counts,
                                                   'core_component': component, 'core_elements': elements,
                                                   'beta': args.beta, 'shared_spares': args.shared_spares,
                                                   't': [t_start, t_end, steps]},
                                      None, started, mttf=mttf_values))
    print(curve.iloc[[0, len(curve) // 2, len(curve) - 1]].to_string(index=False))
    for label, value in mttf_values.items():
        print(f"MTTF {label}: {value:.2f} h")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench_cli", description="Banco de experimentos del RAP de intervalos")
    parser.add_argument('--verbose', '-v', action='store_true', help='Logging DEBUG')
    sub = parser.add_subparsers(dest='command', required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--instance', default='example_one', help='Archivo de instancia o preset')
    common.add_argument('--set', default='1', help='Conjunto de intervalos (1..5 o SETk)')
    common.add_argument('--interval', help="Intervalo de misión explícito '[lo,hi]'")
    common.add_argument('--seed', type=int, help='Semilla maestra')
    common.add_argument('--out', help='Directorio de salida')
    common.add_argument('--params', help='Archivo YAML/JSON de parámetros')
    common.add_argument('--cost-mode', choices=['per_oic_max', 'total'])
    common.add_argument('--objective', choices=['all_ready', 'full'])

    p_eval = sub.add_parser('eval', parents=[common], help='Evalúa una asignación')
    p_eval.add_argument('--allocation', help='Archivo de asignación (texto publicado o JSON)')
    p_eval.set_defaults(handler=cmd_eval)

    p_mc = sub.add_parser('mc', parents=[common], help='Oráculo Monte Carlo')
    p_mc.add_argument('--allocation')
    p_mc.add_argument('--trials', type=int)
    p_mc.add_argument('--endpoint', choices=['lo', 'hi', 'center'], default='center')
    p_mc.set_defaults(handler=cmd_mc)

    for name in ('solve', 'ga', 'pso'):
        p_solve = sub.add_parser(name, parents=[common], help='Corre un solver')
        p_solve.add_argument('--solver', choices=['ga', 'pso'], default='pso' if name == 'pso' else 'ga')
        p_solve.add_argument('--runs', type=int)
        p_solve.add_argument('--trials', type=int)
        p_solve.add_argument('--variant', choices=['gbest', 'lbest'])
        p_solve.add_argument('--search-mode', choices=['allocation', 'interval'])
        p_solve.add_argument('--subtraction', choices=['moore', 'as_printed'], help='Resta de intervalos del PSO')
        p_solve.add_argument('--no-local-search', action='store_true', help='PSO sin ascenso por bits')
        p_solve.add_argument('--no-primary-phase', action='store_true')
        p_solve.set_defaults(handler=cmd_solve)

    p_sweep = sub.add_parser('sweep', parents=[common], help='Barrido de sensibilidad del GA')
    p_sweep.add_argument('--parameter', required=True)
    p_sweep.add_argument('--values', required=True, help="Valores separados por coma")
    p_sweep.add_argument('--repetitions', type=int, default=1)
    p_sweep.add_argument('--no-primary-phase', action='store_true')
    p_sweep.set_defaults(handler=cmd_sweep, variant=None, search_mode=None, subtraction=None, no_local_search=False)

    p_curve = sub.add_parser('curve', parents=[common], help='Confiabilidad vs tiempo')
    p_curve.add_argument('--cores', '--L', type=int, dest='cores')
    p_curve.add_argument('--oics', help="Cantidades de OICs separadas por coma")
    p_curve.add_argument('--element-scale', type=float)
    p_curve.add_argument('--core-component', choices=sorted(LOGICAL_ELEMENTS), help='Elementos lógicos por núcleo')
    p_curve.add_argument('--beta', type=int)
    p_curve.add_argument('--shared-spares', action='store_true')
    p_curve.add_argument('--t-start', type=float)
    p_curve.add_argument('--t-end', type=float)
    p_curve.add_argument('--t-steps', type=int)
    p_curve.add_argument('--mttf', action='store_true')
    p_curve.set_defaults(handler=cmd_curve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Punto de entrada

    Returns:
        0 éxito, 2 error de entrada, 3 violación de dominio, 4 sin convergencia, 1 inesperado
    """
    load_dotenv()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else get_config().get_logging_level()
    logging.basicConfig(level=level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    try:
        return args.handler(args, argv)
    except RapToolkitError as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc}")
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        logger.exception(f"❌ Error inesperado: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands:
    eval     evaluate a built-in function
    table    print a CNCT convergence table (orders 0..N)
    compare  accelerated evaluation against term-by-term summation
    dist     query a Lerch distribution (pmf, cdf, sf, quantile, moment, mean, variance)
    accel    accelerate user-supplied partial sums (one number per line/token)

Exit codes: 0 converged, 1 record printed with converged=false (or a
breakdown / non-convergence), 2 usage or domain error (no record).
"""

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple, Tuple

import pandas as pd

from .cnct import AccelResult, ToleranceSpec, cnct_table, direct_sum
from .condense import scaled
from .distributions import cdf, dist_new, mean, moment, pmf, quantile, sf, variance
from .functions import (LerchParams, euler_harmonic_sum, euler_sum_terms, hurwitz_zeta, lerch_phi,
                        lerch_terms, polylog, polylog_terms, riemann_zeta)
from .kernel import delta_table, epsilon_table, is_finite
from .utils import (AccelError, BreakdownError, ConvergenceError, DomainError, DEFAULT_MAX_ORDER,
                    DEFAULT_MAX_TERMS, DEFAULT_REL_TOL, LOG_LEVELS)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2

FORMATS = ('text', 'csv', 'json')
TABLE_COLUMNS = ('n', 'delta', 'terms_used')
SIGNIFICANT_DIGITS = 17


@dataclass(frozen=True)
class OutputRecord:
    value: float
    error_estimate: float
    order: int
    terms_used: int
    converged: bool
    method: str

    @classmethod
    def from_result(cls, result: AccelResult):
        return cls(result.value, result.error_estimate, result.order, result.terms_used,
                   result.converged, result.method)


RECORD_FIELDS = tuple(OutputRecord.__dataclass_fields__)


class FunctionSpec(NamedTuple):
    params: Tuple[str, ...]
    evaluate: Callable
    terms: Callable


def _lerch_oracle(z, s, v):
    LerchParams(z, s, v)
    return lerch_terms(z, s, v)


def _polylog_oracle(s, z):
    LerchParams(z, s, 1.0)
    return polylog_terms(s, z)


FUNCTIONS = {
    'zeta': FunctionSpec(('s',), riemann_zeta, lambda s: _lerch_oracle(1.0, s, 1.0)),
    'hurwitz': FunctionSpec(('s', 'v'), hurwitz_zeta, lambda s, v: _lerch_oracle(1.0, s, v)),
    'polylog': FunctionSpec(('s', 'z'), polylog, _polylog_oracle),
    'lerch': FunctionSpec(('z', 's', 'v'), lambda z, s, v, tol: lerch_phi(LerchParams(z, s, v), tol),
                          _lerch_oracle),
    'eulersum': FunctionSpec((), euler_harmonic_sum, euler_sum_terms),
}


def resolve_function(name, args):
    """Look up a built-in function and check its arity."""
    if name not in FUNCTIONS:
        raise DomainError(f"unknown function {name!r}; choose from {', '.join(FUNCTIONS)}")
    spec = FUNCTIONS[name]
    if len(args) != len(spec.params):
        expected = ' '.join(spec.params) or 'no arguments'
        raise DomainError(f"{name} takes {len(spec.params)} argument(s) ({expected}), got {len(args)}")
    return spec


def evaluate_function(name, args, tol, scale=1.0):
    spec = resolve_function(name, args)
    return spec.evaluate(*args, tol).scaled(scale)


def function_terms(name, args, scale=1.0):
    spec = resolve_function(name, args)
    return scaled(spec.terms(*args), scale)


# Rendering

def render_number(x):
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return f"{x:.{SIGNIFICANT_DIGITS}g}"


def _with_placeholders(value, numbers):
    # floats become string tokens; to_json splices their 17-digit text back in
    if isinstance(value, dict):
        return {key: _with_placeholders(item, numbers) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_with_placeholders(item, numbers) for item in value]
    if isinstance(value, float):
        if not is_finite(value):
            return None
        token = f"@number{len(numbers)}@"
        numbers[token] = render_number(value)
        return token
    return value


def to_json(obj, indent=None):
    """
    Serialize with json.dumps, keeping 17 significant digits for reals.

    Non-finite reals (an infinite error estimate) become null.
    """
    numbers = {}
    text = json.dumps(_with_placeholders(obj, numbers), indent=indent)
    for token, literal in numbers.items():
        text = text.replace(f'"{token}"', literal)
    return text


def group_digits(text):
    """Group the fractional digits of a decimal literal in threes."""
    if 'e' in text or '.' not in text:
        return text
    whole, fraction = text.split('.')
    return whole + '.' + ' '.join(fraction[i:i + 3] for i in range(0, len(fraction), 3))


def format_records(records, fmt, extra=None, labels=None):
    """
    Render OutputRecords.

    Args:
        records: list of OutputRecord
        fmt: 'text', 'csv' or 'json'
        extra: optional dict of additional columns shared by all rows
        labels: JSON keys for several records (default: their method tags)

    Returns:
        str ending with a newline
    """
    rows = [asdict(record) for record in records]
    extra = extra or {}

    if fmt == 'json':
        if len(rows) == 1 and not extra:
            return to_json(rows[0]) + '\n'
        labels = labels or [row['method'] for row in rows]
        return to_json({**dict(zip(labels, rows)), **extra}) + '\n'

    if fmt == 'csv':
        frame = pd.DataFrame([{**row, **extra} for row in rows])
        return frame.to_csv(index=False, float_format=f'%.{SIGNIFICANT_DIGITS}g', lineterminator='\n')

    blocks = []
    for row in rows:
        blocks.append('\n'.join(f"{key}: {render_number(value)}" for key, value in row.items()))
    blocks.extend(f"{key}: {render_number(value)}" for key, value in extra.items())
    return '\n\n'.join(blocks) + '\n'


def _agreeing_digits(value, reference):
    if value == reference:
        return SIGNIFICANT_DIGITS
    if reference == 0:
        return 0
    relative = abs(value - reference) / abs(reference)
    return max(0, min(SIGNIFICANT_DIGITS, int(math.floor(-math.log10(relative)))))


def format_table(rows, fmt):
    """Render TableRows; text output adds grouped digits and an agreement column."""
    frame = pd.DataFrame([(row.order, row.delta, row.terms_used) for row in rows], columns=list(TABLE_COLUMNS))

    if fmt == 'csv':
        return frame.to_csv(index=False, float_format=f'%.{SIGNIFICANT_DIGITS}g', lineterminator='\n')
    if fmt == 'json':
        return to_json([dict(zip(TABLE_COLUMNS, row)) for row in rows], indent=2) + '\n'

    if frame.empty:
        return 'no rows\n'
    reference = rows[-1].delta
    frame['delta'] = [group_digits(render_number(row.delta)) for row in rows]
    frame['digits'] = [_agreeing_digits(row.delta, reference) for row in rows]
    return frame.to_string(index=False) + '\n'


# Commands

def tolerance_from_args(args):
    return ToleranceSpec(rel_tol=args.tol, max_order=args.max_order, max_terms=args.max_terms)


def _exit_code(record):
    return EXIT_OK if record.converged else EXIT_NOT_CONVERGED


def _unconverged_record(error, method):
    """converged=false record for a ConvergenceError or BreakdownError."""
    best = getattr(error, 'best', None)
    if best is None:
        best = getattr(error, 'last_estimate', None)
    value = float(best) if best is not None else math.nan
    terms = getattr(error, 'terms_used', None) or 0
    return OutputRecord(value, math.inf, -1, int(terms), False, method)


def cmd_eval(args, out):
    tol = tolerance_from_args(args)
    result = evaluate_function(args.function, args.args, tol, args.scale)
    record = OutputRecord.from_result(result)
    out.write(format_records([record], args.format))
    return _exit_code(record)


def cmd_table(args, out):
    if args.orders < 0:
        raise DomainError(f"--orders must be nonnegative, got {args.orders}")
    tol = tolerance_from_args(args)
    oracle = function_terms(args.function, args.args, args.scale)
    rows = cnct_table(oracle, args.orders, tol)
    out.write(format_table(rows, args.format))
    return EXIT_OK if len(rows) == args.orders + 1 else EXIT_NOT_CONVERGED


def cmd_compare(args, out):
    tol = tolerance_from_args(args)
    accelerated = evaluate_function(args.function, args.args, tol, args.scale)
    direct = direct_sum(function_terms(args.function, args.args, args.scale), tol)
    records = [OutputRecord.from_result(accelerated), OutputRecord.from_result(direct)]
    ratio = direct.terms_used / accelerated.terms_used if accelerated.terms_used else math.inf
    out.write(format_records(records, args.format, {'terms_ratio': float(ratio)},
                             labels=('accelerated', 'direct')))
    return _exit_code(records[0])


def run_dist_query(query, z, s, v, k=None, p=None, r=None, tol=None):
    """Evaluate one distribution query and wrap it in an OutputRecord."""
    try:
        d = dist_new(LerchParams(z, s, v), tol)
    except ConvergenceError as e:
        return _unconverged_record(e, query)

    if query in ('pmf', 'cdf', 'sf'):
        if k is None:
            raise DomainError(f"{query} needs k")
        value = {'pmf': pmf, 'cdf': cdf, 'sf': sf}[query](d, int(k))
        error = value * d.norm_err / d.norm
        terms = 1 if query == 'pmf' else int(k) + 1
        return OutputRecord(value, error, -1, terms, True, query)

    if query == 'quantile':
        if p is None:
            raise DomainError("quantile needs p")
        try:
            k = quantile(d, p)
        except ConvergenceError as e:
            return OutputRecord(float(e.best), math.inf, -1, int(e.best) + 1, False, query)
        return OutputRecord(float(k), 0.0, -1, k + 1, True, query)

    if query == 'moment':
        if r is None:
            raise DomainError("moment needs r")
        return OutputRecord.from_result(moment(d, int(r), tol))
    if query == 'mean':
        return OutputRecord.from_result(mean(d, tol))
    if query == 'variance':
        return OutputRecord.from_result(variance(d, tol))
    raise DomainError(f"unknown distribution query {query!r}")


def cmd_dist(args, out):
    tol = tolerance_from_args(args)
    record = run_dist_query(args.query, args.z, args.s, args.v, args.k, args.p, args.r, tol)
    out.write(format_records([record], args.format))
    return _exit_code(record)


def parse_partial_sums(lines):
    """Parse whitespace/newline separated decimal literals, reporting the line of a bad token."""
    values = []
    for line_no, line in enumerate(lines, 1):
        for token in line.split():
            try:
                value = float(token)
            except ValueError:
                raise DomainError(f"line {line_no}: cannot parse {token!r} as a number")
            if not is_finite(value):
                raise DomainError(f"line {line_no}: {token!r} is not finite")
            values.append(value)
    if len(values) < 3:
        raise DomainError(f"at least 3 partial sums are required, got {len(values)}")
    return values


def accelerate_sums(values, method):
    """Apply the delta or epsilon transformation to user-supplied partial sums."""
    if method == 'epsilon':
        table = epsilon_table(values)
        estimates = table.even_estimates()
        error = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else math.inf
        return OutputRecord(table.estimate, error, table.max_even_column, len(values), True, 'epsilon')

    try:
        estimates = delta_table(values)
    except BreakdownError as e:
        logger.error(f"Delta transformation broke down: {e}")
        value = e.last_estimate if e.last_estimate is not None else values[-1]
        return OutputRecord(value, math.inf, -1, len(values), False, 'delta')
    error = abs(estimates[-1] - estimates[-2]) if len(estimates) > 1 else math.inf
    return OutputRecord(estimates[-1], error, len(estimates) - 1, len(values), True, 'delta')


def cmd_accel(args, out):
    if args.input in (None, '-'):
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(args.input) as handle:
                lines = handle.read().splitlines()
        except OSError as e:
            raise DomainError(f"cannot read {args.input}: {e}")
    record = accelerate_sums(parse_partial_sums(lines), args.method)
    out.write(format_records([record], args.format))
    return _exit_code(record)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=DEFAULT_REL_TOL, help='relative tolerance')
    common.add_argument('--max-order', type=int, default=DEFAULT_MAX_ORDER, help='highest transformation order')
    common.add_argument('--max-terms', type=int, default=DEFAULT_MAX_TERMS, help='oracle evaluation budget')
    common.add_argument('--format', choices=FORMATS, default='text')
    common.add_argument('--scale', type=float, default=1.0, help='multiply every series term by this factor')
    common.add_argument('--log-level', type=str.upper, choices=LOG_LEVELS, default=None,
                        help='override LOG_LEVEL')

    parser = argparse.ArgumentParser(prog='cnct-accel',
                                     description='Convergence acceleration with the combined '
                                                 'nonlinear-condensation transformation')
    commands = parser.add_subparsers(dest='command', required=True)
    functions_help = f"one of: {', '.join(FUNCTIONS)}"

    p = commands.add_parser('eval', parents=[common], help='evaluate a function')
    p.add_argument('function', help=functions_help)
    p.add_argument('args', nargs='*', type=float)
    p.set_defaults(handler=cmd_eval)

    p = commands.add_parser('table', parents=[common], help='CNCT convergence table')
    p.add_argument('function', help=functions_help)
    p.add_argument('args', nargs='*', type=float)
    p.add_argument('--orders', type=int, default=12, help='last transformation order to print')
    p.set_defaults(handler=cmd_table)

    p = commands.add_parser('compare', parents=[common], help='accelerated vs term-by-term summation')
    p.add_argument('function', help=functions_help)
    p.add_argument('args', nargs='*', type=float)
    p.set_defaults(handler=cmd_compare)

    p = commands.add_parser('dist', parents=[common],
                            help='Lerch distribution queries (support k = 0, 1, ...; '
                                 'Zipf on {1, 2, ...} is z=1, v=1 shifted by one)')
    p.add_argument('query', choices=('pmf', 'cdf', 'sf', 'quantile', 'moment', 'mean', 'variance'))
    p.add_argument('--z', type=float, required=True)
    p.add_argument('--s', type=float, required=True)
    p.add_argument('--v', type=float, required=True)
    p.add_argument('--k', type=int)
    p.add_argument('--p', type=float)
    p.add_argument('--r', type=int)
    p.set_defaults(handler=cmd_dist)

    p = commands.add_parser('accel', parents=[common], help='accelerate partial sums from a file or stdin')
    p.add_argument('--input', default=None, help='file with partial sums (default: stdin)')
    p.add_argument('--method', choices=('delta', 'epsilon'), default='delta')
    p.set_defaults(handler=cmd_accel)

    return parser


def main(argv=None, out=None):
    """
    Run the command line.

    Returns:
        process exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    out = out or sys.stdout
    if args.log_level:
        logging.getLogger().setLevel(args.log_level)

    start = time.time()
    try:
        code = args.handler(args, out)
    except DomainError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except (ConvergenceError, BreakdownError) as e:
        # exit 1 always comes with a converged=false record
        logger.error(f"{args.command}: {e}")
        out.write(format_records([_unconverged_record(e, args.command)], args.format))
        return EXIT_NOT_CONVERGED
    except AccelError as e:
        logger.error(f"{args.command}: unexpected error: {e}")
        return EXIT_USAGE

    elapsed = time.time() - start
    logger.info(f"{args.command} completed in {elapsed:.3f}s with exit code {code}")
    return code

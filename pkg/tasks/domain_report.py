#!/usr/bin/env python3
"""
CLI tool for analysing polyhedral convex domains in C^N.

Usage:
    python -m tasks.domain_report analyze opt/domains/quadrant.json
    python -m tasks.domain_report distance opt/domains/halfplane.json --z 1 --w 3
"""
import os
import sys
import argparse
import logging
from pathlib import Path

# Add parent directory to path to import hypdomain
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv

from hypdomain.errors import HypDomainError
from hypdomain.pipeline import cmd_analyze, cmd_distance, cmd_exhaust, cmd_iterate, cmd_peaks
from hypdomain.utils import list_domain_jsons, parse_point

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def load_config():
    """Load configuration from environment or .env file."""
    load_dotenv()

    return {
        'seed': int(os.getenv('HYPDOMAIN_SEED', '0')),
        'output_dir': os.getenv('HYPDOMAIN_OUTPUT_DIR', 'opt/reports'),
        'chain_steps': int(os.getenv('HYPDOMAIN_CHAIN_STEPS', '64')),
        'orbit_steps': int(os.getenv('HYPDOMAIN_ORBIT_STEPS', '24')),
    }


def parse_radii(text: str) -> list:
    """Comma-separated positive numbers, e.g. '10,100,1e3'."""
    return [float(part) for part in text.split(',') if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Hyperbolicity, distances, potentials and dynamics of polyhedral convex domains",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m tasks.domain_report analyze opt/domains/quadrant.json
  python -m tasks.domain_report analyze --all                         # every file in opt/domains/
  python -m tasks.domain_report distance opt/domains/halfplane.json --z 1 --w 3
  python -m tasks.domain_report distance opt/domains/quadrant.json --z 1,1 --w 2,3 --grid 50
  python -m tasks.domain_report peaks opt/domains/quadrant.json --base 1,1 --direction 0,1j
  python -m tasks.domain_report peaks opt/domains/quadrant.json --random-rays 5 --seed 3
  python -m tasks.domain_report iterate opt/domains/c1_halfplane.json opt/maps/exp_shift.json \\
      --start "1,1.1447298858494002+1.5707963267948966j"
  python -m tasks.domain_report exhaust opt/domains/halfplane.json --z 1 --w 3 --radii 10,100,1e3,1e4

Points are comma-separated complex literals (1,2+1j) or JSON [re, im] pairs.
        """
    )
    parser.add_argument('--output-dir', help='Report directory (default: $HYPDOMAIN_OUTPUT_DIR or opt/reports)')
    parser.add_argument('--seed', type=int, help='Random seed for sampled points and rays (default: $HYPDOMAIN_SEED or 0)')
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', help='Hyperbolicity verdict and certificates')
    p.add_argument('domain', nargs='?', help='Domain JSON file')
    p.add_argument('--all', action='store_true', help='Analyze every domain file in --input-dir')
    p.add_argument('--input-dir', default='opt/domains', help='Directory of domain files (default: opt/domains)')
    p.add_argument('--samples', type=int, default=200, help='Interior samples for the realization check (default: 200)')

    p = sub.add_parser('distance', help='Kobayashi distance bracket')
    p.add_argument('domain', help='Domain JSON file')
    p.add_argument('--z', required=True, help='First point')
    p.add_argument('--w', required=True, help='Second point')
    p.add_argument('--grid', type=int, default=0, help='Also bracket z against this many sampled points (CSV)')

    p = sub.add_parser('peaks', help='Peak and antipeak scans along rays')
    p.add_argument('domain', help='Domain JSON file')
    p.add_argument('--base', help='Ray base point (default: witness)')
    p.add_argument('--direction', help='Ray direction')
    p.add_argument('--random-rays', type=int, default=0, help='Scan this many random escaping rays instead')
    p.add_argument('--radii', type=parse_radii, help='Comma-separated radii (default: 33 log-spaced in [1, 1e8])')

    p = sub.add_parser('iterate', help='Iterate a split self-map and classify the orbit')
    p.add_argument('domain', help='Domain JSON file')
    p.add_argument('map', help='Map JSON file')
    p.add_argument('--start', help='Starting point (default: witness)')
    p.add_argument('-n', type=int, help='Number of iterations (default: $HYPDOMAIN_ORBIT_STEPS or 24)')
    p.add_argument('--trace', action='store_true', help='Write the full orbit as CSV')

    p = sub.add_parser('exhaust', help='Lower bounds on box truncations')
    p.add_argument('domain', help='Domain JSON file')
    p.add_argument('--z', required=True, help='First point')
    p.add_argument('--w', required=True, help='Second point')
    p.add_argument('--radii', type=parse_radii, required=True, help='Comma-separated box half-widths')
    return parser


def run_command(args, config: dict, domain_path: str) -> int:
    """
    Run one subcommand on one domain file.

    Returns:
        Exit code: 0 success/hyperbolic, 2 non-hyperbolic (analyze), 1 error
    """
    out = config['output_dir']
    seed = config['seed']
    try:
        logger.info(f"Processing: {domain_path}")
        if args.command == 'analyze':
            report, code = cmd_analyze(domain_path, out, seed=seed, samples=args.samples,
                                       orbit_steps=config['orbit_steps'])
            v = report.verdict
            print(f"hyperbolic={v.hyperbolic} k={v.k} m={v.m}")
            for orbit in report.orbits:
                print(f"counterexample orbit: {orbit.classification} period={orbit.period}")
        elif args.command == 'distance':
            report, code = cmd_distance(domain_path, parse_point(args.z), parse_point(args.w),
                                        grid=args.grid, seed=seed, chain_steps=config['chain_steps'],
                                        output_dir=out)
            b = report.distances[0].bracket
            print(f"{b.lower:.9f} {b.upper:.9f} {b.lower_method} {b.upper_method}")
        elif args.command == 'peaks':
            kwargs = {'radii': args.radii} if args.radii else {}
            report, code = cmd_peaks(
                domain_path,
                base=parse_point(args.base) if args.base else None,
                direction=parse_point(args.direction) if args.direction else None,
                random_rays=args.random_rays, seed=seed, output_dir=out, **kwargs,
            )
            for scan in report.potential_scans:
                limit = f" {scan.limit_value:.6f}" if scan.limit_value is not None else ""
                print(f"{scan.kind} {scan.verdict}{limit}")
            for note in report.notes:
                print(f"note: {note}")
        elif args.command == 'iterate':
            report, code = cmd_iterate(
                domain_path, args.map,
                start=parse_point(args.start) if args.start else None,
                n=args.n or config['orbit_steps'], trace=args.trace, output_dir=out,
            )
            orbit = report.orbits[0]
            print(f"{orbit.classification} period={orbit.period} length={orbit.length} ({orbit.method})")
            for note in report.notes:
                print(f"note: {note}")
        else:
            report, code = cmd_exhaust(domain_path, parse_point(args.z), parse_point(args.w),
                                       args.radii, output_dir=out)
            for row in report.exhaustion:
                print(f"{row.R:g} {row.lower:.9f}")
        logger.info(f"✅ {args.command} finished for {domain_path}")
        return code

    except (HypDomainError, OSError, ValueError) as e:
        logger.error(f"❌ Error processing {domain_path}: {e}")
        return 1


def main(argv=None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    # Load configuration
    config = load_config()
    if args.seed is not None:
        config['seed'] = args.seed
    if args.output_dir:
        config['output_dir'] = args.output_dir

    if args.command == 'analyze' and args.all:
        domain_files = list_domain_jsons(args.input_dir)
        if not domain_files:
            logger.warning(f"No domain files found in {args.input_dir}")
            return 0
    elif getattr(args, 'domain', None):
        domain_files = [args.domain]
    else:
        parser.error("a domain file (or --all) is required")

    codes = []
    for domain_file in domain_files:
        codes.append(run_command(args, config, domain_file))
        # Add a separator between files
        if len(domain_files) > 1:
            logger.info("-" * 50)

    if len(domain_files) > 1:
        logger.info(f"📊 Processing complete:")
        logger.info(f"   ✅ Hyperbolic: {codes.count(0)}")
        logger.info(f"   ⚠️  Non-hyperbolic: {codes.count(2)}")
        logger.info(f"   ❌ Failed: {codes.count(1)}")
        logger.info(f"   📁 Output directory: {config['output_dir']}")
    return 1 if 1 in codes else max(codes)


if __name__ == '__main__':
    sys.exit(main())

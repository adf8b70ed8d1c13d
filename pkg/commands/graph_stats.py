"""
Graph Stats Command
====================
Degree histograms and edge overlap of every slide graph.
"""

import argparse

from commands.common import EXIT_OK, emit_json, json_errors
from models.train_config import FEA_METRICS
from services.dataset_service import dataset_service
from services.graph_service import DEFAULT_K, build_slide_graph, graph_stats


def register(subparsers):
    parser = subparsers.add_parser('graph-stats', help='Report slide graph statistics')
    parser.add_argument('--data', required=True, help='Dataset directory')
    parser.add_argument('--slide', default=None, help='Only this slide')
    parser.add_argument('--k-pos', dest='k_pos', type=int, default=DEFAULT_K)
    parser.add_argument('--k-fea', dest='k_fea', type=int, default=DEFAULT_K)
    parser.add_argument('--fea-metric', dest='fea_metric', choices=FEA_METRICS, default='cosine')
    parser.add_argument('--report', default=None, help='Write the report here instead of stdout')
    parser.set_defaults(handler=run)


@json_errors
def run(args: argparse.Namespace) -> int:
    dataset = dataset_service.load_dataset(args.data)
    slides = [dataset.slide(args.slide)] if args.slide else dataset.slides

    stats = {}
    for slide in slides:
        graph = build_slide_graph(slide.positions, slide.features, args.k_pos, args.k_fea,
                                  args.fea_metric)
        stats[slide.slide_id] = graph_stats(graph)
    emit_json(stats, args.report)
    return EXIT_OK

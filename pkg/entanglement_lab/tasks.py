import logging

from celery import group, shared_task
from django.conf import settings

from entanglement_lab.detection import simulate_chunk
from entanglement_lab.serializers import (
    DetectorSerializer,
    SourceSerializer,
    build_detector,
)
from entanglement_lab.stats import DetectionStats, accumulate, merge_all
from entanglement_lab.utils.rng import chunk_layout

logger = logging.getLogger(__name__)


def build_from_payloads(source_payload, detector_payload):
    """
    Rebuild the source and detector of a run from their JSON payloads
    (the resolved `source` and `detector` sections of the config).
    """
    source_serializer = SourceSerializer(data=source_payload)
    source_serializer.is_valid(raise_exception=True)
    detector_serializer = DetectorSerializer(data=detector_payload)
    detector_serializer.is_valid(raise_exception=True)
    return source_serializer.build(), build_detector(detector_serializer.validated_data)


@shared_task
def simulate_chunk_task(source_payload, detector_payload, seed, chunk, first_trial, size, splitter=None):
    """
    Simulate one chunk of trials on a worker and return its mergeable counts.
    """
    source, cfg = build_from_payloads(source_payload, detector_payload)
    batch = simulate_chunk(source, cfg, seed, chunk, first_trial, size, splitter)
    return accumulate([batch]).to_counts()


def aggregate_trials(source_payload, detector_payload, trials, seed, splitter=None):
    """
    DetectionStats of `trials` trials. Chunks run in-process, or as a Celery
    group when LAB_WORKER_BACKEND is "celery"; both give the same counts.
    """
    layout = chunk_layout(trials)
    backend = settings.LAB_WORKER_BACKEND

    if backend == "celery":
        logger.info(f"Dispatching {len(layout)} chunks ({trials} trials) to celery workers.")
        job = group(
            simulate_chunk_task.s(
                source_payload, detector_payload, seed, chunk, first_trial, size, splitter
            )
            for chunk, first_trial, size in layout
        )
        parts = job.apply_async().get()
        return merge_all(DetectionStats.from_counts(part) for part in parts)

    logger.info(f"Running {len(layout)} chunks ({trials} trials) in-process.")
    source, cfg = build_from_payloads(source_payload, detector_payload)
    return merge_all(
        accumulate([simulate_chunk(source, cfg, seed, chunk, first_trial, size, splitter)])
        for chunk, first_trial, size in layout
    )

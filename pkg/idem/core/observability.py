"""
OpenTelemetry observability configuration for tracing and run metrics.
"""

import logging

# OpenTelemetry imports
from opentelemetry import metrics, trace
from opentelemetry.exporter.otlp.proto.grpc.metric_exporter import OTLPMetricExporter
from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
from opentelemetry.instrumentation.system_metrics import SystemMetricsInstrumentor
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import PeriodicExportingMetricReader
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor

from .config import Config

logger = logging.getLogger(__name__)

# Global instances for custom spans and metrics
_meter = None
_qtot_counter = None
_configured = False


def get_tracer(name: str = "idem"):
    """Get a tracer; spans are no-ops until setup_telemetry() installs a provider"""
    return trace.get_tracer(name)


def get_meter():
    """Get the global meter instance for creating custom metrics"""
    global _meter
    if _meter is None:
        _meter = metrics.get_meter("idem")
    return _meter


def record_qtot_evaluation(count: int = 1) -> None:
    """Count q_tot evaluations"""
    global _qtot_counter
    if _qtot_counter is None:
        _qtot_counter = get_meter().create_counter(
            "idem.qtot.evaluations",
            unit="1",
            description="Number of q_tot metric evaluations",
        )
    _qtot_counter.add(count)


def _otlp_headers():
    if Config.OTEL_EXPORTER_OTLP_HEADERS:
        return {"Authorization": f"Bearer {Config.OTEL_EXPORTER_OTLP_HEADERS}"}
    return None


def setup_telemetry():
    """Setup OpenTelemetry tracing and metrics; later calls are no-ops"""
    global _configured
    if _configured:
        return
    _configured = True

    resource = Resource.create(
        {
            "service.name": Config.OTEL_SERVICE_NAME,
            "service.version": Config.OTEL_SERVICE_VERSION,
            "service.instance.id": Config.HOSTNAME,
        }
    )

    provider = TracerProvider(resource=resource)
    trace.set_tracer_provider(provider)

    otlp_endpoint = Config.OTEL_EXPORTER_OTLP_ENDPOINT

    if otlp_endpoint:
        span_exporter = OTLPSpanExporter(endpoint=otlp_endpoint, headers=_otlp_headers())
        provider.add_span_processor(BatchSpanProcessor(span_exporter))

        metric_reader = PeriodicExportingMetricReader(
            exporter=OTLPMetricExporter(endpoint=otlp_endpoint, headers=_otlp_headers()),
            export_interval_millis=5000,
        )
        metrics.set_meter_provider(
            MeterProvider(resource=resource, metric_readers=[metric_reader])
        )

        # CPU and memory of long sweeps are worth exporting alongside spans
        SystemMetricsInstrumentor().instrument()

        logger.info(f"OpenTelemetry OTLP exporters configured with endpoint: {otlp_endpoint}")
    else:
        logger.debug(
            "OpenTelemetry OTLP exporters not configured (OTEL_EXPORTER_OTLP_ENDPOINT not set)"
        )


def shutdown_telemetry():
    """Flush pending spans; the SDK shuts the provider down at interpreter exit"""
    provider = trace.get_tracer_provider()
    if isinstance(provider, TracerProvider):
        provider.force_flush()

import io
import logging

from django.conf import settings
from rest_framework import status
from rest_framework.decorators import api_view, parser_classes, permission_classes
from rest_framework.parsers import FormParser, MultiPartParser
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from .exceptions import DegeneracyError, HelixError
from .ingest import apply_crosswalk, build_crosswalks, parse_panel, read_crosswalk_entries, select_crosswalk
from .report import build_report, report_payload
from .serializers import CrosswalkEntrySerializer, ReportRequestSerializer

logger = logging.getLogger(__name__)


def _error_response(exc):
    code = status.HTTP_422_UNPROCESSABLE_ENTITY if isinstance(exc, DegeneracyError) else status.HTTP_400_BAD_REQUEST
    return Response({"error": exc.code, "detail": str(exc)}, status=code)


@api_view(["POST"])
@permission_classes([AllowAny])
@parser_classes([MultiPartParser, FormParser])
def analysis_report(request):
    """
    Run the full analysis on an uploaded panel.
    Expects: input (CSV file), optional axis, degree, centering, crosswalk, revision
    """
    serializer = ReportRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({"error": "invalid-request", "detail": serializer.errors}, status=status.HTTP_400_BAD_REQUEST)

    options = serializer.validated_data
    defaults = settings.TRIHELIX
    upload = options["input"]

    try:
        text = upload.read().decode("utf-8-sig")
    except UnicodeDecodeError:
        return Response({"error": "schema-error", "detail": "Input must be UTF-8 encoded CSV"}, status=status.HTTP_400_BAD_REQUEST)

    try:
        panel = parse_panel(io.StringIO(text, newline=""), source=upload.name)
        crosswalk_name = None
        if options.get("crosswalk"):
            crosswalks = build_crosswalks(read_crosswalk_entries(defaults["CROSSWALK_PATH"]))
            crosswalk = select_crosswalk(
                crosswalks, revision=options.get("revision"), switch_year=defaults["REVISION_SWITCH_YEAR"],
            )
            panel = apply_crosswalk(panel, crosswalk)
            crosswalk_name = options.get("revision") or "by-year"
        report = build_report(
            panel,
            input_name=upload.name,
            axis=options.get("axis", defaults["DEFAULT_AXIS"]),
            degree=options.get("degree", defaults["FIT_DEGREE"]),
            centering=options.get("centering", defaults["HURST_CENTERING"]),
            band=defaults["HURST_RANDOM_BAND"],
            crosswalk=crosswalk_name,
        )
    except HelixError as exc:
        logger.warning(f"Report for {upload.name} failed: {exc.code}: {exc}")
        return _error_response(exc)

    logger.info(f"Report built for {upload.name}: {len(panel)} year(s)")
    return Response(report_payload(report, defaults["SIGNIFICANT_DIGITS"]), status=status.HTTP_200_OK)


@api_view(["GET"])
@permission_classes([AllowAny])
def crosswalk_entries(request):
    """The shipped crosswalk; ?revision= narrows it to one source revision."""
    try:
        entries = read_crosswalk_entries(settings.TRIHELIX["CROSSWALK_PATH"])
    except HelixError as exc:
        return _error_response(exc)

    revision = request.query_params.get("revision")
    if revision:
        entries = [entry for entry in entries if entry.source_revision == revision]
    serializer = CrosswalkEntrySerializer(entries, many=True)
    return Response(serializer.data, status=status.HTTP_200_OK)

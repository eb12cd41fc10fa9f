from rest_framework import serializers

from .hurst import Centering
from .tensor import AXES


class ReportRequestSerializer(serializers.Serializer):
    """Upload of a long-format panel plus the analysis options of the report command."""
    input = serializers.FileField()
    axis = serializers.ChoiceField(choices=list(AXES), required=False)
    degree = serializers.IntegerField(min_value=1, max_value=10, required=False)
    centering = serializers.ChoiceField(choices=[item.value for item in Centering], required=False)
    crosswalk = serializers.BooleanField(required=False, default=False)
    revision = serializers.CharField(required=False, allow_blank=False)

    def validate_input(self, value):
        if value.size == 0:
            raise serializers.ValidationError("Uploaded file is empty")
        return value


class CrosswalkEntrySerializer(serializers.Serializer):
    source_revision = serializers.CharField()
    source_code = serializers.CharField()
    target_class = serializers.CharField()
    note = serializers.CharField(allow_blank=True)

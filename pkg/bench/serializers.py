from rest_framework import serializers


class BenchRowSerializer(serializers.Serializer):
    family = serializers.CharField()
    n = serializers.IntegerField()
    seed = serializers.IntegerField()
    mode = serializers.CharField()
    # an int, or 'bound:<limit>' / 'timeout'
    answer_count = serializers.CharField()
    unit_groundings = serializers.CharField(allow_blank=True)
    unit_solves = serializers.CharField(allow_blank=True)
    conflicts = serializers.CharField(allow_blank=True)
    learned_constraints = serializers.CharField(allow_blank=True)
    wall_ms = serializers.CharField(allow_blank=True)

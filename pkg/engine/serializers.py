from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from .ast import atom_key


def sorted_atoms(atoms):
    return [str(a) for a in sorted(atoms, key=atom_key)]


class AtomListField(serializers.Field):
    """A set of atoms, rendered as a sorted list of strings."""

    def to_representation(self, value):
        return sorted_atoms(value)


class InconsistencyReasonSerializer(serializers.Serializer):
    r_plus = AtomListField()
    r_minus = AtomListField()
    constraint = serializers.SerializerMethodField()

    def get_constraint(self, obj):
        return str(obj.as_constraint())


class SolveStatsSerializer(serializers.Serializer):
    decisions = serializers.IntegerField()
    conflicts = serializers.IntegerField()
    learned = serializers.IntegerField()
    candidates = serializers.IntegerField()
    rejected_candidates = serializers.IntegerField()


class SolveResultSerializer(serializers.Serializer):
    """{'consistent': bool, 'answer_sets': [...], 'stats': {...}} as printed by solve --json."""

    consistent = serializers.BooleanField()
    answer_sets = serializers.SerializerMethodField()
    stats = SolveStatsSerializer(required=False, allow_null=True)

    def get_answer_sets(self, obj):
        return [sorted_atoms(a) for a in sorted(obj['answer_sets'], key=sorted_atoms)]


class ExplainResultSerializer(serializers.Serializer):
    method = serializers.CharField()
    domain = AtomListField()
    consistent = serializers.BooleanField()
    reasons = InconsistencyReasonSerializer(many=True)


class UnitCountersSerializer(serializers.Serializer):
    groundings = serializers.IntegerField()
    solves = serializers.IntegerField()
    conflicts = serializers.IntegerField()
    learned = serializers.IntegerField()


class LearnedConstraintSerializer(serializers.Serializer):
    unit = serializers.SerializerMethodField()
    constraint = serializers.SerializerMethodField()

    def get_unit(self, obj):
        return obj[0]

    def get_constraint(self, obj):
        return str(obj[1])


class ChainResultSerializer(serializers.Serializer):
    mode = serializers.CharField()
    answer_sets = serializers.SerializerMethodField()
    counters = UnitCountersSerializer(many=True)
    learned = LearnedConstraintSerializer(many=True)

    def get_answer_sets(self, obj):
        return [sorted_atoms(a) for a in sorted(obj.answer_sets, key=sorted_atoms)]


def render_json(serializer):
    return JSONRenderer().render(serializer.data).decode('utf-8')

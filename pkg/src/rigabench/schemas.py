"""Request and response models of the elicitation session HTTP API."""

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field

SessionStateName = Literal["AwaitingAnswer", "Computing", "Finished", "Failed"]


class KnapsackSpec(BaseModel):
    """Generator reference: the instance is rebuilt from its seed."""

    model_config = ConfigDict(extra="forbid")

    problem: Literal["knapsack"]
    size: int = Field(ge=2, description="item count; capacity is size//2")
    n: int = Field(ge=2, description="objective count")
    seed: int = 0


class TspSpec(BaseModel):
    """Generator reference: the instance is rebuilt from its seed."""

    model_config = ConfigDict(extra="forbid")

    problem: Literal["tsp"]
    size: int = Field(ge=4, description="city count")
    n: int = Field(ge=2, description="objective count")
    seed: int = 0


class CatalogSpec(BaseModel):
    """Inline list of alternatives, one cost vector per option."""

    model_config = ConfigDict(extra="forbid")

    problem: Literal["catalog"]
    options: list[list[float]] = Field(min_length=1)
    orientation: Literal["min", "max"]


InstanceSpec = Annotated[
    KnapsackSpec | TspSpec | CatalogSpec, Field(discriminator="problem")
]


class ConfigSpec(BaseModel):
    """Run parameters; unset fields fall back to the per-problem defaults."""

    model_config = ConfigDict(extra="forbid")

    family: Literal["WS", "OWA", "Choquet2"]
    generations: int | None = Field(default=None, ge=1)
    population_size: int | None = Field(default=None, ge=2)
    survivors: int | None = Field(default=None, ge=1)
    mutation_rate: float | None = Field(default=None, ge=0.0, le=1.0)
    sigma: float | None = Field(default=None, ge=0.0)
    delta: float = Field(default=0.0, ge=0.0)
    seed: int = 0

    def overrides(self) -> dict:
        """The explicitly set run parameters, family excluded."""
        data = self.model_dump(exclude={"family"})
        return {key: value for key, value in data.items() if value is not None}


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ConfigSpec
    instance: InstanceSpec


class AnswerIn(BaseModel):
    """One answer; ``query_index`` makes duplicate submissions detectable
    and should echo the pending query's index."""

    model_config = ConfigDict(extra="forbid")

    choice: Literal["A", "B"]
    query_index: int | None = Field(default=None, ge=0)


class ProgressOut(BaseModel):
    generation: int
    total_generations: int
    queries_asked: int
    normalized_mmr: float | None


class ObjectiveOut(BaseModel):
    """Display context for one objective: the value range over the pool the
    pending pair was drawn from, for normalized rendering."""

    label: str
    min: float
    max: float


class QueryOut(BaseModel):
    query_index: int
    a: list[float]
    b: list[float]
    objectives: list[ObjectiveOut]
    progress: ProgressOut


class RecommendationPointerOut(BaseModel):
    """Returned by the query endpoint once no query will ever be pending."""

    state: Literal["Finished"]
    recommendation: str


class SolutionOut(BaseModel):
    encoding: list[int]
    cost: list[float]


class RecommendationOut(BaseModel):
    solution: SolutionOut
    trace: dict


class SessionOut(BaseModel):
    id: str
    state: SessionStateName
    problem: str
    n: int
    size: int
    family: str
    orientation: str
    config: dict
    progress: ProgressOut
    warnings: list[str]


class HealthOut(BaseModel):
    status: Literal["ok"]

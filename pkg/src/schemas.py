from pydantic import BaseModel, ConfigDict


class CustomBase(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")


class FrozenBase(CustomBase):
    model_config = ConfigDict(frozen=True)

"""Schema of the ``[logging]`` table, as used by :func:`logging.config.dictConfig`."""

from typing import Any, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FormatterConfig(BaseModel):
    """A logging formatter."""

    model_config = ConfigDict(extra="allow", populate_by_name=True)

    format: str | None = None
    datefmt: str | None = None
    style: Literal["%", "{", "$"] | None = None
    class_name: str | None = Field(
        None,
        alias="class",
        description="The fully qualified name of the formatter class",
    )


class HandlerConfig(BaseModel):
    """A logging handler."""

    model_config = ConfigDict(extra="allow", populate_by_name=True)

    class_name: str | None = Field(
        None,
        alias="class",
        description="The fully qualified name of the handler class",
    )
    level: str | int | None = None
    formatter: str | None = Field(None, description="Must match a key in 'formatters'.")


class LoggerConfig(BaseModel):
    """A named logger."""

    model_config = ConfigDict(extra="forbid")

    level: str | int | None = None
    handlers: list[str] = Field(
        default_factory=list, description="Must match keys in 'handlers'."
    )
    propagate: bool = True


class RootLoggerConfig(BaseModel):
    """The root logger."""

    model_config = ConfigDict(extra="forbid")

    level: str | int = Field("WARNING", description="The minimum severity level to log.")
    handlers: list[str] = Field(
        default_factory=list, description="Must match keys in 'handlers'."
    )


class AppLoggingConfig(BaseModel):
    """The complete logging configuration."""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1] = Field(1, description="The schema version. Must be 1.")
    disable_existing_loggers: bool = False
    formatters: dict[str, FormatterConfig] = Field(default_factory=dict)
    handlers: dict[str, HandlerConfig] = Field(default_factory=dict)
    loggers: dict[str, LoggerConfig] = Field(default_factory=dict)
    root: RootLoggerConfig = Field(default_factory=RootLoggerConfig)

    @model_validator(mode="after")
    def _validate_cross_references(self) -> Self:
        """Check that handlers and loggers only refer to defined components."""
        for h_name, handler in self.handlers.items():
            if handler.formatter and handler.formatter not in self.formatters:
                raise ValueError(
                    f"Configuration error in handler '{h_name}': formatter "
                    f"'{handler.formatter}' is referenced but not defined."
                )

        sources: dict[str, list[str]] = {
            f"logger '{name}'": logger.handlers for name, logger in self.loggers.items()
        }
        sources["root logger"] = self.root.handlers
        for source, names in sources.items():
            missing = [name for name in names if name not in self.handlers]
            if missing:
                raise ValueError(
                    f"Configuration error in {source}: the following handler "
                    f"names are referenced but not defined: {', '.join(missing)}"
                )
        return self

    def as_dictconfig(self) -> dict[str, Any]:
        """Return the table in the shape :func:`logging.config.dictConfig` expects."""
        return self.model_dump(by_alias=True, exclude_none=True)

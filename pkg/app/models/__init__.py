from app.models.BaseModel import BaseModelMixin
from app.models.AlgebraModel import AlgebraSpec
from app.models.SubspaceModel import SubspaceSpec
from app.models.KernelContextModel import KernelContext
from app.models.FieldFunctionModel import FieldFunction
from app.models.DomainModel import DomainSpec, NodeBatch
from app.models.QuadratureConfigModel import QuadratureConfig, RuleSpec
from app.models.IntegralModel import ApproachSpec, PVConfig
from app.models.VerificationModel import ConvergenceReport, VerificationCase
from app.models.CliConfigModel import CliConfig, EvalRequest
